//! Spectral projections `Q_k = f x phi_k^{n-1}`, their decomposition into
//! bigraded type components, special Hermite partial sums, and the sphere
//! and cone injectivity experiments.

mod cone;
mod corpus;
mod sphere;

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::Serialize;

pub use cone::{cone_injectivity_experiment, ConeConfig, ConeReport, DirectionFit, FittedCoefficient, BinomialCheck};
pub use corpus::{corpus, CorpusComponent, CorpusEntry, CorpusField};
pub use sphere::{decay_hypothesis, sphere_injectivity_experiment, DecayCheck, SphereConfig, SphereReport, RecoveredCoefficient};

use crate::error::{Error, Result};
use crate::exact::{ln_factorial, sphere_area};
use crate::harmonics::{dim_hpq, harmonic_basis, sph_coefficients_sampled, HarmonicBasis, SphereRule};
use crate::laguerre::{eval_phi, phi_norm_sq_f64, phi_radial};
use crate::par;
use crate::poly::Poly;
use crate::quadrature::CompositeRule;
use crate::twisted::{check_points, twist_phase, twisted_convolution, Field, GridSpec, PhiField, TRUNCATION_TOL};

fn norm(z: &[Complex64]) -> f64 {
    z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn finite(v: Complex64) -> bool {
    v.re.is_finite() && v.im.is_finite()
}

/// `Q_k = f x phi_k^{n-1}` at the probes, by grid quadrature.
pub fn spectral_projection(f: &dyn Field, k: usize, grid: &GridSpec, probes: &[Vec<Complex64>]) -> Result<Vec<Complex64>> {
    twisted_convolution(f, &PhiField { k, n: grid.n }, grid, 1.0, probes)
}

/// `Q_k` for several `k` at once; `f(z - w)` is evaluated once per node.
/// Returns one row per entry of `ks`.
pub fn spectral_projections(f: &dyn Field, ks: &[usize], grid: &GridSpec, probes: &[Vec<Complex64>]) -> Result<Vec<Vec<Complex64>>> {
    if f.dim() != grid.n {
        return Err(Error::DimensionMismatch { expected: grid.n, got: f.dim() });
    }
    check_points(grid, probes)?;
    let n = grid.n;
    let nk = ks.len();
    // node-major kernel table
    let kernels: Vec<Vec<f64>> = par::map_range(grid.len(), |i| {
        let mut w = [Complex64::new(0.0, 0.0); 2];
        grid.node(i, &mut w[..n]);
        ks.iter().map(|&k| eval_phi(k, n, &w[..n])).collect()
    });
    let dv = grid.cell_volume();
    let rows = par::map(probes, |z| {
        let mut w = [Complex64::new(0.0, 0.0); 2];
        let mut d = [Complex64::new(0.0, 0.0); 2];
        let mut acc = vec![Complex64::new(0.0, 0.0); nk];
        let mut peak = vec![0.0f64; nk];
        let mut edge = vec![0.0f64; nk];
        for (i, ker) in kernels.iter().enumerate() {
            grid.node(i, &mut w[..n]);
            for j in 0..n {
                d[j] = z[j] - w[j];
            }
            let v = f.eval(&d[..n]) * twist_phase(1.0, z, &w[..n]);
            if v == Complex64::new(0.0, 0.0) {
                continue;
            }
            let boundary = grid.on_boundary(i);
            let vn = v.norm();
            for a in 0..nk {
                let t = v * ker[a];
                let m = vn * ker[a].abs();
                peak[a] = peak[a].max(m);
                if boundary && m > edge[a] {
                    edge[a] = m;
                }
                acc[a] += t;
            }
        }
        (acc, peak, edge)
    });
    let mut out = vec![Vec::with_capacity(probes.len()); nk];
    for (z, (acc, peak, edge)) in probes.iter().zip(rows) {
        for a in 0..nk {
            let v = acc[a] * dv;
            if !finite(v) {
                return Err(Error::NonFinite(format!("projection at {z:?}")));
            }
            if peak[a] > 0.0 && edge[a] > TRUNCATION_TOL * peak[a] {
                return Err(Error::Decay(format!(
                    "integrand at the box edge is {:.2e} of its peak for z = {z:?}, k = {}",
                    edge[a] / peak[a],
                    ks[a]
                )));
            }
            out[a].push(v);
        }
    }
    Ok(out)
}

/// Harmonic bases keyed by `(n, p, q)`, built once and shared.
#[derive(Clone, Default)]
pub struct BasisCache {
    inner: Arc<Mutex<HashMap<(usize, usize, usize), Arc<HarmonicBasis>>>>,
}

impl BasisCache {
    pub fn get(&self, n: usize, p: usize, q: usize) -> Arc<HarmonicBasis> {
        if let Some(b) = self.inner.lock().unwrap().get(&(n, p, q)) {
            return b.clone();
        }
        let b = Arc::new(harmonic_basis(n, p, q));
        self.inner.lock().unwrap().entry((n, p, q)).or_insert(b).clone()
    }
}

/// Smallest `Q` for which the tail of the `q`-series is bounded: `n + k - 2p + 2`.
pub fn tail_threshold(n: usize, k: usize, p: usize) -> usize {
    (n + k + 2).saturating_sub(2 * p)
}

/// Default truncation in `q`: four past the tail threshold.
pub fn default_q_max(n: usize, k: usize, p: usize) -> usize {
    tail_threshold(n, k, p) + 4
}

#[derive(Clone, Debug)]
pub struct ExpansionOptions {
    /// Uniform truncation in `q`; `None` uses [`default_q_max`] per `p`.
    pub q_max: Option<usize>,
    /// Radius of the ball the tail bound covers.
    pub radius: f64,
    /// Assumed bound on the angular degree of `f`; sets the sphere rule.
    pub angular_degree: usize,
    /// Gauss-Legendre order per radial panel.
    pub radial_order: usize,
    /// Components whose coefficients all fall below this fraction of the
    /// largest coefficient are dropped.
    pub drop_tol: f64,
    /// `||Q_k||_2` when known; otherwise `(2 pi)^n ||f||_2` is used.
    pub projection_norm: Option<f64>,
    /// Largest accepted relative change of the radial coefficients between
    /// the two quadrature orders. Interpolated grid data needs a looser value.
    pub resolution_tol: f64,
}

impl Default for ExpansionOptions {
    fn default() -> Self {
        ExpansionOptions { q_max: None, radius: 2.0, angular_degree: 8, radial_order: 12, drop_tol: 1e-9, projection_norm: None, resolution_tol: 1e-7 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PolyTerm {
    pub alpha: Vec<u8>,
    pub beta: Vec<u8>,
    pub re: f64,
    pub im: f64,
}

/// One `P_{p,q}^k`, stored numerically.
#[derive(Clone, Debug, Serialize)]
pub struct ExpansionEntry {
    pub p: usize,
    pub q: usize,
    pub terms: Vec<PolyTerm>,
    #[serde(skip)]
    pub poly: Poly<Complex64>,
}

impl ExpansionEntry {
    fn new(p: usize, q: usize, poly: Poly<Complex64>) -> Self {
        let n = poly.dim();
        let terms = poly
            .terms()
            .map(|(m, c)| PolyTerm { alpha: m.alpha[..n].to_vec(), beta: m.beta[..n].to_vec(), re: c.re, im: c.im })
            .collect();
        ExpansionEntry { p, q, terms, poly }
    }

    /// Largest coefficient of the Laplacian, relative to the largest coefficient.
    pub fn harmonic_defect(&self) -> f64 {
        let scale = self.poly.terms().map(|(_, c)| c.norm()).fold(0.0, f64::max);
        let lap = self.poly.laplacian().terms().map(|(_, c)| c.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            0.0
        } else {
            lap / scale
        }
    }

    /// `int_{S^{2n-1}} |P|^2 dsigma` (unnormalized measure).
    pub fn sphere_norm_sq(&self) -> Result<f64> {
        let n = self.poly.dim();
        let rule = SphereRule::for_degree(n, 2 * (self.p + self.q))?;
        let v = rule.integrate(1.0, |z| Complex64::new(self.poly.eval(z).norm_sqr(), 0.0)).re;
        Ok(sphere_area(n) * v)
    }
}

/// One `C_{k-p,j}^{p,q}` with its provenance.
#[derive(Clone, Debug, Serialize)]
pub struct CoefficientRow {
    pub k: usize,
    pub p: usize,
    pub q: usize,
    pub j: usize,
    pub re: f64,
    pub im: f64,
    pub radial_nodes: usize,
    pub sphere_nodes: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct TailBound {
    pub radius: f64,
    /// `None` when some `p` is truncated below its threshold.
    pub value: Option<f64>,
    pub status: String,
    pub norm: f64,
    pub norm_source: String,
    pub q_max: Vec<usize>,
    pub thresholds: Vec<usize>,
}

impl TailBound {
    pub fn claimed(&self) -> bool {
        self.value.is_some()
    }
}

fn ln_binom(a: usize, b: usize) -> f64 {
    ln_factorial(a as u64) - ln_factorial(b as u64) - ln_factorial((a - b) as u64)
}

/// Bound on `sum_{p <= k} sum_{q > Q_p} |P_{p,q}^k(z) phi_{k-p}^{gamma-1}(z)|` over `|z| <= R`,
/// given `C >= ||Q_k||_2`.
///
/// Per term: the `L^2` layering gives `||P_{p,q}||_{sigma} <= C / sqrt(|S| ||phi_{k-p}^{gamma-1}||^2)`,
/// the reproducing kernel of `H_{p,q}` gives the sup over the sphere up to
/// `sqrt(dim H_{p,q})`, and `|phi_m^a| <= binom(m + a, m)`.
pub fn tail_bound(k: usize, n: usize, radius: f64, q_max: &[usize], norm: f64, norm_source: &str) -> TailBound {
    let thresholds: Vec<usize> = (0..=k).map(|p| tail_threshold(n, k, p)).collect();
    let base = TailBound {
        radius,
        value: None,
        status: String::new(),
        norm,
        norm_source: norm_source.into(),
        q_max: q_max.to_vec(),
        thresholds: thresholds.clone(),
    };
    if q_max.len() != k + 1 || q_max.iter().zip(&thresholds).any(|(q, m)| q < m) {
        return TailBound { status: "not_in_asymptotic_regime".into(), ..base };
    }
    if radius == 0.0 || norm == 0.0 {
        return TailBound { value: Some(0.0), status: "bounded".into(), ..base };
    }
    let ln_s = sphere_area(n).ln();
    let ln_r = radius.ln();
    let ln_c = norm.ln();
    let mut total = 0.0;
    for p in 0..=k {
        let m = k - p;
        let ln_term = |q: usize| -> Option<f64> {
            let dim = dim_hpq(n, p, q).to_f64()?;
            if dim == 0.0 {
                return None;
            }
            let gamma = n + p + q;
            let ln_norm = (gamma - 1) as f64 * 2f64.ln() + ln_factorial((m + gamma - 1) as u64) - ln_factorial(m as u64);
            Some((p + q) as f64 * ln_r + 0.5 * dim.ln() + ln_binom(m + gamma - 1, m) - 0.5 * (ln_s + ln_norm) + ln_c)
        };
        let mut sum = 0.0;
        let mut prev: Option<f64> = None;
        let mut q = q_max[p] + 1;
        loop {
            let Some(lt) = ln_term(q) else {
                // n = 1 with p, q > 0: the space is trivial for every larger q
                break;
            };
            let t = lt.exp();
            sum += t;
            if let Some(pl) = prev {
                let ratio = (lt - pl).exp();
                if ratio < 0.5 && t <= 1e-30 * sum.max(f64::MIN_POSITIVE) {
                    sum += t * ratio / (1.0 - ratio);
                    break;
                }
            }
            prev = Some(lt);
            q += 1;
            if q > q_max[p] + 20_000 {
                return TailBound { status: "series_not_converged".into(), ..base };
            }
        }
        total += sum;
    }
    TailBound { value: Some(total), status: "bounded".into(), ..base }
}

/// Truncated expansion of `Q_k` into type components `P_{p,q}^k phi_{k-p}^{n+p+q-1}`.
#[derive(Clone, Debug, Serialize)]
pub struct SpectralExpansion {
    pub k: usize,
    pub n: usize,
    pub q_max: Vec<usize>,
    pub entries: Vec<ExpansionEntry>,
    pub coefficients: Vec<CoefficientRow>,
    pub tail: TailBound,
    pub field_norm: f64,
    pub radial_extent: f64,
    pub radial_nodes: usize,
    pub sphere_nodes: usize,
    /// Largest disagreement between the two radial rules, relative to the
    /// largest coefficient.
    pub radial_discrepancy: f64,
}

impl SpectralExpansion {
    pub fn entry(&self, p: usize, q: usize) -> Option<&ExpansionEntry> {
        self.entries.iter().find(|e| e.p == p && e.q == q)
    }

    /// `sum_{p,q} ||P_{p,q}||^2_{S} ||phi_{k-p}^{gamma-1}||^2`, the squared
    /// `L^2` norm of the truncated expansion.
    pub fn layered_norm_sq(&self) -> Result<f64> {
        let mut acc = 0.0;
        for e in &self.entries {
            acc += e.sphere_norm_sq()? * phi_norm_sq_f64(self.k - e.p, self.n + e.p + e.q);
        }
        Ok(acc)
    }
}

fn shell_samples(f: &dyn Field, rule: &SphereRule, radii: &[f64]) -> Result<Vec<Vec<Complex64>>> {
    let n = rule.n;
    let rows = par::map(radii, |&r| {
        let mut buf = [Complex64::new(0.0, 0.0); 2];
        rule.points
            .iter()
            .map(|w| {
                for j in 0..n {
                    buf[j] = w[j] * r;
                }
                f.eval(&buf[..n])
            })
            .collect::<Vec<_>>()
    });
    for (r, row) in radii.iter().zip(&rows) {
        if row.iter().any(|v| !finite(*v)) {
            return Err(Error::NonFinite(format!("samples on the shell of radius {r}")));
        }
    }
    Ok(rows)
}

/// First even `u = r^2/2 >= 8` past which `max |f| e^{-u/2} (1+2u)^growth`
/// stays below `1e-17` of its peak.
fn radial_extent(f: &dyn Field, growth: i32) -> Result<f64> {
    let rule = SphereRule::for_degree(f.dim(), 8)?;
    let mut peak = 0.0f64;
    let mut quiet = 0;
    let mut u = 0.0f64;
    while u <= 400.0 {
        let r = (2.0 * u).sqrt();
        let s = shell_samples(f, &rule, &[r])?;
        let m = s[0].iter().map(|v| v.norm()).fold(0.0, f64::max);
        let env = m * (-0.5 * u).exp() * (1.0 + 2.0 * u).powi(growth);
        peak = peak.max(env);
        if u >= 8.0 && env <= 1e-17 * peak {
            quiet += 1;
            if quiet >= 2 {
                return Ok(u);
            }
        } else {
            quiet = 0;
        }
        u += 2.0;
    }
    Err(Error::Resolution(format!("f has not decayed by |z|^2/2 = 400 (envelope {peak:.3e})")))
}

/// Computes `P_{p,q}^k = (2pi)^n sum_j C_{k-p,j}^{p,q} Y_j` for `p <= k`,
/// `q <= Q_p` from shell samples of `f`:
/// `a_j(rho)` from spherical quadrature, then
/// `C_{k-p,j} = int a_j(rho) phi_{k-p}^{gamma-1}(rho) rho^{2n+p+q-1} drho / ||phi_{k-p}^{gamma-1}||^2`.
///
/// The radial integrals are done twice (orders `m` and `m - 4` on the same
/// panels); a disagreement above `1e-7` of the largest coefficient is
/// refused as under-resolved.
pub fn extract_expansion(f: &dyn Field, k: usize, opts: &ExpansionOptions, cache: &BasisCache) -> Result<SpectralExpansion> {
    let n = f.dim();
    if !(1..=2).contains(&n) {
        return Err(Error::invalid(format!("spherical quadrature is available for n <= 2, got {n}")));
    }
    if !(opts.radius >= 0.0 && opts.radius.is_finite()) {
        return Err(Error::invalid("ball radius must be finite and nonnegative"));
    }
    if opts.radial_order < 8 {
        return Err(Error::invalid("radial order must be at least 8"));
    }
    let q_max: Vec<usize> = (0..=k).map(|p| opts.q_max.unwrap_or_else(|| default_q_max(n, k, p))).collect();
    let max_deg = (0..=k).map(|p| p + q_max[p]).max().unwrap_or(0);
    let rule = SphereRule::for_degree(n, opts.angular_degree + max_deg)?;
    let upper = radial_extent(f, (n + k + max_deg) as i32)?;
    let panels = (upper / 2.0).ceil() as usize;
    let main = CompositeRule::new(0.0, upper, panels, opts.radial_order);
    let check = CompositeRule::new(0.0, upper, panels, opts.radial_order - 4);
    let to_r = |u: &[f64]| u.iter().map(|u| (2.0 * u).sqrt()).collect::<Vec<_>>();
    let (r_main, r_check) = (to_r(&main.nodes), to_r(&check.nodes));
    let s_main = shell_samples(f, &rule, &r_main)?;
    let s_check = shell_samples(f, &rule, &r_check)?;

    // field norm from the same samples: |S| int rho^{2n-1} int |f|^2 dsigma drho
    let shell_norm = |s: &[Complex64]| -> f64 { s.iter().zip(&rule.weights).map(|(v, w)| v.norm_sqr() * w).sum() };
    let field_norm_sq: f64 = s_main
        .iter()
        .zip(&r_main)
        .zip(&main.weights)
        .map(|((s, r), w)| w * r.powi(2 * n as i32 - 2) * shell_norm(s))
        .sum::<f64>()
        * sphere_area(n);

    let pairs: Vec<(usize, usize)> = (0..=k).flat_map(|p| (0..=q_max[p]).map(move |q| (p, q))).collect();
    let radial = |rule_u: &CompositeRule, radii: &[f64], a: &[Vec<Complex64>], p: usize, q: usize, j: usize| -> Complex64 {
        let gamma = n + p + q;
        let mut acc = Complex64::new(0.0, 0.0);
        for ((row, r), w) in a.iter().zip(radii).zip(&rule_u.weights) {
            // d rho = du / rho
            let kern = phi_radial(k - p, (gamma - 1) as f64, *r) * r.powi((2 * n + p + q) as i32 - 2);
            acc += row[j] * (w * kern);
        }
        acc / phi_norm_sq_f64(k - p, gamma)
    };
    let computed = par::map(&pairs, |&(p, q)| -> Result<Option<(usize, usize, Vec<Complex64>, f64)>> {
        let basis = cache.get(n, p, q);
        if basis.is_empty() {
            return Ok(None);
        }
        let a_main = sph_coefficients_sampled(&s_main, &basis, &rule)?;
        let a_check = sph_coefficients_sampled(&s_check, &basis, &rule)?;
        let mut cs = Vec::with_capacity(basis.len());
        let mut diff = 0.0f64;
        for j in 0..basis.len() {
            let c = radial(&main, &r_main, &a_main, p, q, j);
            let c2 = radial(&check, &r_check, &a_check, p, q, j);
            diff = diff.max((c - c2).norm());
            cs.push(c);
        }
        Ok(Some((p, q, cs, diff)))
    });
    let mut rows = Vec::new();
    for c in computed {
        if let Some(v) = c? {
            rows.push(v);
        }
    }
    let c_max = rows.iter().flat_map(|r| r.2.iter()).map(|c| c.norm()).fold(0.0, f64::max);
    let diff_max = rows.iter().map(|r| r.3).fold(0.0, f64::max);
    let discrepancy = if c_max > 0.0 { diff_max / c_max } else { diff_max };
    if discrepancy > opts.resolution_tol && diff_max > 1e-14 {
        return Err(Error::Resolution(format!(
            "radial coefficients change by {discrepancy:.2e} (relative) between quadrature orders {} and {}",
            opts.radial_order,
            opts.radial_order - 4
        )));
    }
    let floor = (opts.drop_tol * c_max).max(1e-14);
    let scale = (2.0 * PI).powi(n as i32);
    let mut entries = Vec::new();
    let mut coefficients = Vec::new();
    for (p, q, cs, _) in rows {
        if cs.iter().all(|c| c.norm() <= floor) {
            continue;
        }
        let basis = cache.get(n, p, q);
        let mut poly = Poly::zero(n);
        for (j, (c, y)) in cs.iter().zip(&basis.elements).enumerate() {
            coefficients.push(CoefficientRow {
                k,
                p,
                q,
                j,
                re: c.re,
                im: c.im,
                radial_nodes: main.nodes.len(),
                sphere_nodes: rule.len(),
            });
            poly.add_scaled(&y.to_c64(), &(c * scale));
        }
        entries.push(ExpansionEntry::new(p, q, poly));
    }
    let (norm, source) = match opts.projection_norm {
        Some(v) => (v, "projection_l2"),
        None => (scale * field_norm_sq.sqrt(), "field_l2_bound"),
    };
    let tail = tail_bound(k, n, opts.radius, &q_max, norm, source);
    Ok(SpectralExpansion {
        k,
        n,
        q_max,
        entries,
        coefficients,
        tail,
        field_norm: field_norm_sq.sqrt(),
        radial_extent: upper,
        radial_nodes: main.nodes.len(),
        sphere_nodes: rule.len(),
        radial_discrepancy: discrepancy,
    })
}

/// The truncated double sum at `z`; refused outside the tail-bound ball.
pub fn evaluate_expansion(exp: &SpectralExpansion, z: &[Complex64]) -> Result<Complex64> {
    if z.len() != exp.n {
        return Err(Error::DimensionMismatch { expected: exp.n, got: z.len() });
    }
    let r = norm(z);
    if r > exp.tail.radius * (1.0 + 1e-12) {
        return Err(Error::OutOfBall { radius: exp.tail.radius, norm: r });
    }
    Ok(exp
        .entries
        .iter()
        .map(|e| e.poly.eval(z) * phi_radial(exp.k - e.p, (exp.n + e.p + e.q - 1) as f64, r))
        .sum())
}

/// Polar quadrature on `C` in `(u = r^2/2, theta)`, where `dA = du dtheta`.
#[derive(Clone, Debug)]
pub struct PolarRule {
    pub points: Vec<Vec<Complex64>>,
    pub weights: Vec<f64>,
}

impl PolarRule {
    pub fn new(u_max: f64, panels: usize, order: usize, angles: usize) -> Self {
        let radial = CompositeRule::new(0.0, u_max, panels, order);
        let dt = 2.0 * PI / angles as f64;
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for (u, w) in radial.nodes.iter().zip(&radial.weights) {
            let r = (2.0 * u).sqrt();
            for a in 0..angles {
                points.push(vec![Complex64::from_polar(r, a as f64 * dt)]);
                weights.push(w * dt);
            }
        }
        PolarRule { points, weights }
    }

    /// Covers `|z|^2/2 <= 36` with a grid of half-width 9 available.
    pub fn standard() -> Self {
        Self::new(36.0, 3, 16, 24)
    }

    /// Grid used to evaluate projections at the polar nodes.
    pub fn grid() -> GridSpec {
        GridSpec::new(1, 18.0, 256).expect("fixed grid is valid")
    }
}

/// `||Q_k||_2^2` for `n = 1` by polar quadrature of grid projections.
pub fn projection_norm_sq(f: &dyn Field, ks: &[usize]) -> Result<Vec<f64>> {
    if f.dim() != 1 {
        return Err(Error::Guardrail("full-field projection norms are computed for n = 1 only".into()));
    }
    let rule = PolarRule::standard();
    let q = spectral_projections(f, ks, &PolarRule::grid(), &rule.points)?;
    Ok(q.iter().map(|row| row.iter().zip(&rule.weights).map(|(v, w)| v.norm_sqr() * w).sum()).collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct Reconstruction {
    pub k_max: usize,
    pub probes: Vec<Vec<Complex64>>,
    pub target: Vec<Complex64>,
    /// `(2pi)^{-n} sum_{k <= K} Q_k` at the probes.
    pub partial_sum: Vec<Complex64>,
    /// Largest probe residual after each `K`.
    pub probe_residuals: Vec<f64>,
    /// `||f - S_K||_2` after each `K` (polar quadrature, `n = 1` only).
    pub l2_residuals: Option<Vec<f64>>,
}

/// Special Hermite partial sums `S_K = (2pi)^{-n} sum_{k <= K} f x phi_k`.
pub fn special_hermite_reconstruct(
    f: &dyn Field,
    k_max: usize,
    grid: &GridSpec,
    probes: &[Vec<Complex64>],
    l2: bool,
) -> Result<Reconstruction> {
    let n = f.dim();
    let ks: Vec<usize> = (0..=k_max).collect();
    let scale = (2.0 * PI).powi(-(n as i32));
    let q = spectral_projections(f, &ks, grid, probes)?;
    let target: Vec<Complex64> = probes.iter().map(|z| f.eval(z)).collect();
    let mut partial = vec![Complex64::new(0.0, 0.0); probes.len()];
    let mut probe_residuals = Vec::with_capacity(ks.len());
    for row in &q {
        for (s, v) in partial.iter_mut().zip(row) {
            *s += v * scale;
        }
        probe_residuals.push(partial.iter().zip(&target).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max));
    }
    let l2_residuals = if l2 {
        if n != 1 {
            return Err(Error::Guardrail("L2 reconstruction residuals are computed for n = 1 only".into()));
        }
        let rule = PolarRule::standard();
        let qp = spectral_projections(f, &ks, &PolarRule::grid(), &rule.points)?;
        let mut acc: Vec<Complex64> = rule.points.iter().map(|z| -f.eval(z)).collect();
        let mut out = Vec::with_capacity(ks.len());
        for row in &qp {
            for (a, v) in acc.iter_mut().zip(row) {
                *a += v * scale;
            }
            out.push(acc.iter().zip(&rule.weights).map(|(v, w)| v.norm_sqr() * w).sum::<f64>().sqrt());
        }
        Some(out)
    } else {
        None
    };
    Ok(Reconstruction { k_max, probes: probes.to_vec(), target, partial_sum: partial, probe_residuals, l2_residuals })
}

#[derive(Clone, Debug, Serialize)]
pub struct EigenCheck {
    pub k: usize,
    pub probe: Vec<Complex64>,
    pub steps: Vec<f64>,
    /// `|(L - (2k+n)) Q_k|` at the probe for each step, with
    /// `L = -Delta + |z|^2/4 - i sum_j (x_j d/dy_j - y_j d/dx_j)`.
    pub residuals: Vec<f64>,
    /// Same without the rotation term, i.e. for `-Delta + |z|^2/4` alone.
    pub plain_residuals: Vec<f64>,
    pub value: Complex64,
    /// Successive residual ratios; about 4 for a second-order stencil.
    pub ratios: Vec<f64>,
}

/// Applies the special Hermite operator with central second differences to
/// grid values of `Q_k` around `probe`, for each step size.
pub fn fd_eigen_check(f: &dyn Field, k: usize, grid: &GridSpec, probe: &[Complex64], steps: &[f64]) -> Result<EigenCheck> {
    let n = grid.n;
    if probe.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: probe.len() });
    }
    let mut pts = vec![probe.to_vec()];
    for &h in steps {
        for j in 0..n {
            for d in [Complex64::new(h, 0.0), Complex64::new(-h, 0.0), Complex64::new(0.0, h), Complex64::new(0.0, -h)] {
                let mut z = probe.to_vec();
                z[j] += d;
                pts.push(z);
            }
        }
    }
    let v = spectral_projection(f, k, grid, &pts)?;
    let center = v[0];
    let eig = (2 * k + n) as f64;
    let r2 = norm(probe).powi(2);
    let stride = 4 * n;
    let mut residuals = Vec::new();
    let mut plain_residuals = Vec::new();
    for (s, &h) in steps.iter().enumerate() {
        let nb = &v[1 + s * stride..1 + (s + 1) * stride];
        let lap = (nb.iter().sum::<Complex64>() - center * (stride as f64)) / (h * h);
        let mut rot = Complex64::new(0.0, 0.0);
        for j in 0..n {
            let b = &nb[4 * j..4 * j + 4];
            let dx = (b[0] - b[1]) / (2.0 * h);
            let dy = (b[2] - b[3]) / (2.0 * h);
            rot += dy * probe[j].re - dx * probe[j].im;
        }
        let plain = -lap + center * (r2 / 4.0) - center * eig;
        plain_residuals.push(plain.norm());
        residuals.push((plain - Complex64::i() * rot).norm());
    }
    let ratios = residuals.windows(2).map(|w| w[0] / w[1]).collect();
    Ok(EigenCheck { k, probe: probe.to_vec(), steps: steps.to_vec(), residuals, plain_residuals, value: center, ratios })
}

#[cfg(test)]
mod tests;
