use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::sphere_area;
use crate::harmonics::{random_sphere_points, BigradedPolynomial};
use crate::laguerre::{isolate_real_roots, laguerre_coeffs_int, phi_norm_sq_f64, phi_radial};
use crate::par;
use crate::twisted::{twisted_spherical_mean, weighted_constant, RadialProfile, SphereMeasureSpec, TypeField};

/// Numerical stand-in for "`e^{|z|^2/4} f` is in some `L^p`": on the grid
/// radius, `e^{r^2/4} |f(r)|` may grow at most polynomially, with log-log
/// slope between `r = 6` and `r = 10` at most `2K + 6`.
#[derive(Clone, Debug, Serialize)]
pub struct DecayCheck {
    pub radii: [f64; 2],
    pub weighted: [f64; 2],
    pub slope: f64,
    pub limit: f64,
    pub passed: bool,
}

pub fn decay_hypothesis(f: &RadialProfile, k_max: usize) -> DecayCheck {
    let radii = [6.0, 10.0];
    let weighted = radii.map(|r: f64| (r * r / 4.0).exp() * f.eval(r).abs());
    let limit = (2 * k_max + 6) as f64;
    let slope = match (weighted[0], weighted[1]) {
        (a, b) if !a.is_finite() || !b.is_finite() => f64::INFINITY,
        (_, b) if b == 0.0 => 0.0,
        (a, _) if a == 0.0 => f64::INFINITY,
        (a, b) => (b / a).ln() / (radii[1] / radii[0]).ln(),
    };
    DecayCheck { radii, weighted, slope, limit, passed: slope <= limit }
}

#[derive(Clone, Debug)]
pub struct SphereConfig {
    /// Weight `P` of the measure `P dmu_r`; fixes `n`, `p`, `q`.
    pub weight: BigradedPolynomial,
    /// Radii `R` of the spheres carrying the data.
    pub sphere_radii: Vec<f64>,
    /// Radii `r` of the measures.
    pub measure_radii: Vec<f64>,
    pub k_max: usize,
    pub points_per_sphere: usize,
    pub seed: u64,
    /// Recovered coefficients below this are reported as zero.
    pub noise_floor: f64,
}

impl SphereConfig {
    pub fn new(weight: BigradedPolynomial, sphere_radii: Vec<f64>, k_max: usize, seed: u64) -> Self {
        let m = (k_max + 4).max(8);
        let measure_radii = (1..=m).map(|i| 4.0 * i as f64 / m as f64).collect();
        SphereConfig { weight, sphere_radii, measure_radii, k_max, points_per_sphere: 3, seed, noise_floor: 1e-8 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RadiusCertificate {
    pub radius: f64,
    /// `phi_{k-q}^{gamma-1}(R)`.
    pub laguerre_value: f64,
    /// Distance from `R^2/2` to the nearest isolated zero of `L_{k-q}^{gamma-1}`
    /// (`None`: no zero below `R^2/2 + 1`).
    pub root_distance: Option<f64>,
    pub pinned: bool,
    pub recovered: Option<Complex64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RecoveredCoefficient {
    pub k: usize,
    /// `pinned`, `not_pinned` (every radius sits on a zero) or `unreachable` (`k < q`).
    pub status: String,
    pub radius_used: Option<f64>,
    /// Recovered `<f, phi_k^{n-1}>`.
    pub recovered: Option<Complex64>,
    /// Same inner product by direct radial quadrature.
    pub truth: f64,
    /// `|recovered - truth|` over the largest `|truth|` (or absolute when all vanish).
    pub error: Option<f64>,
    pub per_radius: Vec<RadiusCertificate>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SphereReport {
    pub n: usize,
    pub p: usize,
    pub q: usize,
    pub k_max: usize,
    pub seed: u64,
    pub profile: String,
    pub sphere_radii: Vec<f64>,
    pub measure_radii: Vec<f64>,
    pub decay: DecayCheck,
    pub condition: Vec<f64>,
    pub fit_residual: Vec<f64>,
    pub under_resolved: usize,
    pub coefficients: Vec<RecoveredCoefficient>,
    pub verdict: String,
}

fn root_distance(m: usize, order: usize, x: f64) -> Option<f64> {
    if m == 0 {
        return None;
    }
    let roots = isolate_real_roots(&laguerre_coeffs_int(m, order), 0.0, x + 1.0, 1e-12);
    roots.iter().map(|iv| if x >= iv.lo && x <= iv.hi { 0.0 } else { (x - iv.lo).abs().min((x - iv.hi).abs()) }).reduce(f64::min)
}

/// Least squares with unit-norm column scaling; returns the solution,
/// the condition number and the relative residual.
pub(crate) fn least_squares(a: DMatrix<Complex64>, b: &DVector<Complex64>) -> Result<(Vec<Complex64>, f64, f64)> {
    let mut a = a;
    let scales: Vec<f64> = (0..a.ncols())
        .map(|j| {
            let s = a.column(j).norm();
            if s > 0.0 {
                1.0 / s
            } else {
                1.0
            }
        })
        .collect();
    for (j, s) in scales.iter().enumerate() {
        a.column_mut(j).scale_mut(*s);
    }
    let svd = a.clone().svd(true, true);
    let sv = &svd.singular_values;
    let smax = sv.max();
    let smin = sv.min();
    let cond = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if cond > 1e12 {
        return Err(Error::IllConditioned(cond));
    }
    let x = svd.solve(b, 0.0).map_err(|e| Error::invalid(e.to_string()))?;
    let res = (&a * &x - b).norm();
    let bn = b.norm();
    let rel = if bn > 0.0 { res / bn } else { res };
    Ok((x.iter().zip(&scales).map(|(v, s)| v * *s).collect(), cond, rel))
}

/// Weighted twisted spherical means of a radial `f` on spheres `S_R`, fitted
/// to `P(z) sum_k y_k (2pi)^{-n} C_k r^{2(p+q)} phi_{k-q}^{gamma-1}(r)` with
/// `y_k = <f, phi_k> phi_{k-q}^{gamma-1}(R) / ||phi_k||^2`, from which
/// `<f, phi_k>` is read off at every radius where `phi_{k-q}^{gamma-1}(R) != 0`.
pub fn sphere_injectivity_experiment(f: &RadialProfile, cfg: &SphereConfig) -> Result<SphereReport> {
    let w = &cfg.weight;
    let (n, p, q) = (w.n(), w.p(), w.q());
    if !(1..=2).contains(&n) {
        return Err(Error::invalid(format!("spherical means are available for n <= 2, got {n}")));
    }
    if !w.is_harmonic() || w.is_zero() {
        return Err(Error::invalid("weight must be a nonzero harmonic polynomial"));
    }
    if cfg.sphere_radii.is_empty() || cfg.sphere_radii.iter().any(|r| !(*r > 0.0)) {
        return Err(Error::invalid("need at least one positive sphere radius"));
    }
    if cfg.measure_radii.iter().any(|r| !(*r > 0.0)) {
        return Err(Error::invalid("measure radii must be positive"));
    }
    let decay = decay_hypothesis(f, cfg.k_max);
    if !decay.passed {
        return Err(Error::Decay(format!(
            "e^(r^2/4)|f| grows with log-log slope {:.2} > {} between r = 6 and 10",
            decay.slope, decay.limit
        )));
    }
    let gamma = n + p + q;
    let ks: Vec<usize> = (q..=cfg.k_max).collect();
    if cfg.measure_radii.len() < ks.len() {
        return Err(Error::ProbeSet(format!("{} measure radii cannot resolve {} coefficients", cfg.measure_radii.len(), ks.len())));
    }
    let field = TypeField::radial(f.clone(), n);
    let pc = w.to_c64();
    let col = |k: usize, r: f64| -> f64 {
        weighted_constant(k, p, q, n).unwrap_or(0.0) * (2.0 * PI).powi(-(n as i32)) * r.powi(2 * (p + q) as i32)
            * phi_radial(k - q, (gamma - 1) as f64, r)
    };

    let mut per_radius: Vec<Vec<Option<Complex64>>> = Vec::new();
    let mut condition = Vec::new();
    let mut fit_residual = Vec::new();
    let mut under = 0;
    for (ri, &big_r) in cfg.sphere_radii.iter().enumerate() {
        // probes on S_R where the weight is not small
        let cand = random_sphere_points(n, 4 * cfg.points_per_sphere.max(1), cfg.seed.wrapping_add(ri as u64));
        let mut cand: Vec<(f64, Vec<Complex64>)> = cand
            .into_iter()
            .map(|u| {
                let z: Vec<Complex64> = u.iter().map(|c| c * big_r).collect();
                (pc.eval(&z).norm(), z)
            })
            .collect();
        cand.sort_by(|a, b| b.0.total_cmp(&a.0));
        let probes: Vec<Vec<Complex64>> = cand.into_iter().take(cfg.points_per_sphere.max(1)).map(|c| c.1).collect();
        let jobs: Vec<(usize, usize)> =
            (0..probes.len()).flat_map(|a| (0..cfg.measure_radii.len()).map(move |b| (a, b))).collect();
        let vals = par::map(&jobs, |&(a, b)| {
            let spec = SphereMeasureSpec::resolved(n, cfg.measure_radii[b], big_r).with_weight(w.clone());
            twisted_spherical_mean(&field, &spec, &probes[a])
        });
        let mut a_mat = DMatrix::<Complex64>::zeros(jobs.len(), ks.len());
        let mut rhs = DVector::<Complex64>::zeros(jobs.len());
        for (row, (&(a, b), v)) in jobs.iter().zip(vals).enumerate() {
            let v = v?;
            if v.status != "ok" {
                under += 1;
            }
            rhs[row] = v.value();
            let pz = pc.eval(&probes[a]);
            for (c, &k) in ks.iter().enumerate() {
                a_mat[(row, c)] = pz * col(k, cfg.measure_radii[b]);
            }
        }
        let (y, cond, res) = least_squares(a_mat, &rhs)?;
        condition.push(cond);
        fit_residual.push(res);
        per_radius.push(y.into_iter().map(Some).collect());
    }

    let area = sphere_area(n);
    let truths: Vec<f64> = (0..=cfg.k_max).map(|k| area * f.inner(k, n)).collect();
    let scale = truths.iter().map(|t| t.abs()).fold(0.0, f64::max);
    let mut coefficients = Vec::new();
    for k in 0..=cfg.k_max {
        let truth = truths[k];
        if k < q {
            coefficients.push(RecoveredCoefficient {
                k,
                status: "unreachable".into(),
                radius_used: None,
                recovered: None,
                truth,
                error: None,
                per_radius: Vec::new(),
            });
            continue;
        }
        let norm_sq = area * phi_norm_sq_f64(k, n);
        let idx = k - q;
        let certs: Vec<RadiusCertificate> = cfg
            .sphere_radii
            .iter()
            .zip(&per_radius)
            .map(|(&big_r, ys)| {
                let lv = phi_radial(k - q, (gamma - 1) as f64, big_r);
                let dist = root_distance(k - q, gamma - 1, big_r * big_r / 2.0);
                let pinned = dist.map_or(true, |d| d > 1e-6);
                let recovered = if pinned { ys[idx].map(|y| y * norm_sq / lv) } else { None };
                RadiusCertificate { radius: big_r, laguerre_value: lv, root_distance: dist, pinned, recovered }
            })
            .collect();
        let first = certs.iter().find(|c| c.pinned);
        let recovered = first.and_then(|c| c.recovered);
        let error = recovered.map(|v| {
            let e = (v - truth).norm();
            if scale > 0.0 {
                e / scale
            } else {
                e
            }
        });
        coefficients.push(RecoveredCoefficient {
            k,
            status: if first.is_some() { "pinned" } else { "not_pinned" }.into(),
            radius_used: first.map(|c| c.radius),
            recovered,
            truth,
            error,
            per_radius: certs,
        });
    }
    let reachable: Vec<&RecoveredCoefficient> = coefficients.iter().filter(|c| c.status != "unreachable").collect();
    let verdict = if reachable.iter().any(|c| c.status == "not_pinned") {
        "incomplete: some coefficients are not pinned by these radii"
    } else if reachable.iter().all(|c| c.recovered.map_or(false, |v| v.norm() < cfg.noise_floor)) {
        "all coefficients pinned to zero"
    } else {
        "coefficients recovered"
    };
    Ok(SphereReport {
        n,
        p,
        q,
        k_max: cfg.k_max,
        seed: cfg.seed,
        profile: f.tag().to_string(),
        sphere_radii: cfg.sphere_radii.clone(),
        measure_radii: cfg.measure_radii.clone(),
        decay,
        condition,
        fit_residual,
        under_resolved: under,
        coefficients,
        verdict: verdict.into(),
    })
}
