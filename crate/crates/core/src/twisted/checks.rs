use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::BigRational;
use serde::Serialize;

use super::{twisted_convolution, twisted_spherical_mean, Field, GridSpec, PhiField, RadialProfile, SphereMeasureSpec};
use crate::error::{Error, Result};
use crate::exact::{factorial_rat, rat_to_f64, sphere_area};
use crate::harmonics::BigradedPolynomial;
use crate::laguerre::{phi_norm_sq_f64, phi_radial};
use crate::quadrature::RadialRule;

fn norm(z: &[Complex64]) -> f64 {
    z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn max_abs(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

fn rel_err(lhs: &[Complex64], rhs: &[Complex64]) -> f64 {
    let diff = lhs.iter().zip(rhs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    let scale = max_abs(rhs).max(max_abs(lhs));
    if scale == 0.0 {
        0.0
    } else {
        diff / scale
    }
}

/// `B_k^n = k! (n-1)! / (n+k-1)!`.
pub fn b_coefficient(k: usize, n: usize) -> BigRational {
    factorial_rat(k as u64) * factorial_rat(n as u64 - 1) / factorial_rat((n + k - 1) as u64)
}

#[derive(Clone, Debug, Serialize)]
pub struct ProjectionCheck {
    pub k: usize,
    pub n: usize,
    /// `int_0^inf f(r) phi_k^{n-1}(r) r^{2n-1} dr`
    pub radial_inner: Complex64,
    pub lhs: Vec<Complex64>,
    pub rhs: Vec<Complex64>,
    pub rel_err: f64,
}

fn rotation_deviation(f: &dyn Field, n: usize) -> f64 {
    let mut dev = 0.0f64;
    let mut scale = 0.0f64;
    for r in [0.3, 0.9, 1.6, 2.5, 3.7] {
        let mut e1 = vec![Complex64::new(0.0, 0.0); n];
        e1[0] = Complex64::new(r, 0.0);
        let base = f.eval(&e1);
        scale = scale.max(base.norm());
        for (a, b, c) in [(0.4, 1.1, -0.7), (1.2, -2.3, 0.5), (0.9, 2.9, 1.9)] {
            let z: Vec<Complex64> = if n == 1 {
                vec![Complex64::from_polar(r, b)]
            } else {
                let mut z = vec![Complex64::new(0.0, 0.0); n];
                z[0] = Complex64::from_polar(r * f64::cos(a), b);
                z[1] = Complex64::from_polar(r * f64::sin(a), c);
                z
            };
            dev = dev.max((f.eval(&z) - base).norm());
        }
    }
    if scale == 0.0 {
        dev
    } else {
        dev / scale
    }
}

/// Compares `f x phi_k^{n-1}` with `B_k^n <f, phi_k^{n-1}> phi_k^{n-1}` for radial `f`.
pub fn radial_projection_check(f: &dyn Field, k: usize, grid: &GridSpec, points: &[Vec<Complex64>]) -> Result<ProjectionCheck> {
    let n = grid.n;
    let dev = rotation_deviation(f, n);
    if dev > 1e-8 {
        return Err(Error::NotRadial(dev));
    }
    let lhs = twisted_convolution(f, &PhiField { k, n }, grid, 1.0, points)?;
    let radial_inner = RadialRule::default().integrate_c(n as f64, |r| {
        let mut e1 = vec![Complex64::new(0.0, 0.0); n];
        e1[0] = Complex64::new(r, 0.0);
        f.eval(&e1) * phi_radial(k, n as f64 - 1.0, r)
    });
    let c = rat_to_f64(&b_coefficient(k, n)) * sphere_area(n) * radial_inner;
    let rhs: Vec<Complex64> = points.iter().map(|z| c * phi_radial(k, n as f64 - 1.0, norm(z))).collect();
    let rel_err = rel_err(&lhs, &rhs);
    Ok(ProjectionCheck { k, n, radial_inner, lhs, rhs, rel_err })
}

/// Constant `C` with `aP x phi_k = (2pi)^{-n} C P phi_{k-p}^{gamma-1} int a phi_{k-p}^{gamma-1} t^{2 gamma - 1} dt`:
/// `C = (2 pi)^{2n} / ||phi_{k-p}^{gamma-1}||^2`.
pub fn hecke_bochner_constant(k: usize, p: usize, q: usize, n: usize) -> Option<f64> {
    (k >= p).then(|| (2.0 * PI).powi(2 * n as i32) / phi_norm_sq_f64(k - p, n + p + q))
}

/// Constant `C` in the weighted spherical mean
/// `phi_k x (P dmu_t)(z) = (2pi)^{-n} C t^{2(p+q)} phi_{k-q}(t) P(z) phi_{k-q}(z)`:
/// `C = (2 pi)^{2n} / (|S^{2n-1}| ||phi_{k-q}^{gamma-1}||^2)`.
pub fn weighted_constant(k: usize, p: usize, q: usize, n: usize) -> Option<f64> {
    (k >= q).then(|| (2.0 * PI).powi(2 * n as i32) / (sphere_area(n) * phi_norm_sq_f64(k - q, n + p + q)))
}

#[derive(Clone, Debug, Serialize)]
pub struct HeckeBochnerReport {
    pub n: usize,
    pub p: usize,
    pub q: usize,
    pub k: usize,
    pub branch: String,
    pub constant: Option<f64>,
    pub radial_inner: f64,
    pub lhs: Vec<Complex64>,
    pub rhs: Vec<Complex64>,
    /// Relative error on the nonzero branch, largest `|lhs|` on the vanishing one.
    pub error: f64,
}

impl HeckeBochnerReport {
    pub fn within(&self, rel_tol: f64, abs_tol: f64) -> bool {
        match self.branch.as_str() {
            "vanishing" => self.error <= abs_tol,
            _ => self.error <= rel_tol,
        }
    }
}

/// Checks `aP x phi_k^{n-1}` against the dimension-shifted radial reduction.
///
/// `constant` overrides the closed-form `C` (e.g. with a calibrated value).
pub fn hecke_bochner_check(
    profile: &RadialProfile,
    p: &BigradedPolynomial,
    k: usize,
    grid: &GridSpec,
    points: &[Vec<Complex64>],
    constant: Option<f64>,
) -> Result<HeckeBochnerReport> {
    let n = grid.n;
    if p.n() != n {
        return Err(Error::DimensionMismatch { expected: n, got: p.n() });
    }
    if !p.is_harmonic() {
        return Err(Error::NotHarmonic(p.laplacian().poly().len()));
    }
    let (pd, qd) = (p.p(), p.q());
    let gamma = n + pd + qd;
    let f = super::TypeField::new(profile.clone(), p);
    let lhs = twisted_convolution(&f, &PhiField { k, n }, grid, 1.0, points)?;
    let pc = p.to_c64();
    if k < pd {
        return Ok(HeckeBochnerReport {
            n,
            p: pd,
            q: qd,
            k,
            branch: "vanishing".into(),
            constant: None,
            radial_inner: 0.0,
            rhs: vec![Complex64::new(0.0, 0.0); lhs.len()],
            error: max_abs(&lhs),
            lhs,
        });
    }
    let c = constant.or_else(|| hecke_bochner_constant(k, pd, qd, n)).unwrap();
    let j = k - pd;
    let inner = profile.inner(j, gamma);
    let pre = (2.0 * PI).powi(-(n as i32)) * c * inner;
    let rhs: Vec<Complex64> = points.iter().map(|z| pc.eval(z) * (pre * phi_radial(j, gamma as f64 - 1.0, norm(z)))).collect();
    Ok(HeckeBochnerReport {
        n,
        p: pd,
        q: qd,
        k,
        branch: "nonzero".into(),
        constant: Some(c),
        radial_inner: inner,
        error: rel_err(&lhs, &rhs),
        lhs,
        rhs,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct WeightedFit {
    pub n: usize,
    pub p: usize,
    pub q: usize,
    pub k: usize,
    pub branch: String,
    pub radii: Vec<f64>,
    /// Single scalar fitted over all radii and probes.
    pub constant: Option<Complex64>,
    /// Scalar fitted at each radius separately.
    pub per_radius: Vec<Option<Complex64>>,
    /// Relative residual of the one-scalar model, or largest `|lhs|` on the
    /// vanishing branch.
    pub residual: f64,
    pub closed_form: Option<f64>,
    pub under_resolved: usize,
}

fn fit_scalar(lhs: &[Complex64], basis: &[Complex64]) -> Option<(Complex64, f64)> {
    let bb: f64 = basis.iter().map(|b| b.norm_sqr()).sum();
    let ll: f64 = lhs.iter().map(|b| b.norm_sqr()).sum();
    if bb <= 1e-24 * ll.max(1e-300) || bb == 0.0 {
        return None;
    }
    let c: Complex64 = basis.iter().zip(lhs).map(|(b, l)| b.conj() * l).sum::<Complex64>() / bb;
    let res: f64 = basis.iter().zip(lhs).map(|(b, l)| (l - c * b).norm_sqr()).sum();
    Some((c, if ll == 0.0 { 0.0 } else { (res / ll).sqrt() }))
}

/// Computes `phi_k x (P dmu_t)(z)` at every radius and probe, and fits the
/// one scalar multiplying `(2pi)^{-n} t^{2(p+q)} phi_{k-q}^{gamma-1}(t) P(z) phi_{k-q}^{gamma-1}(z)`.
pub fn weighted_functional_check(p: &BigradedPolynomial, k: usize, radii: &[f64], probes: &[Vec<Complex64>]) -> Result<WeightedFit> {
    let n = p.n();
    if !(1..=2).contains(&n) {
        return Err(Error::invalid(format!("spherical quadrature is available for n <= 2, got {n}")));
    }
    if radii.is_empty() || probes.is_empty() {
        return Err(Error::ProbeSet("need at least one radius and one probe".into()));
    }
    let (pd, qd) = (p.p(), p.q());
    let gamma = n + pd + qd;
    let pc = p.to_c64();
    let phi = PhiField { k, n };
    let mut lhs = Vec::new();
    let mut under = 0;
    for &t in radii {
        let mut row = Vec::new();
        for z in probes {
            let spec = SphereMeasureSpec::resolved(n, t, norm(z)).with_weight(p.clone());
            let v = twisted_spherical_mean(&phi, &spec, z)?;
            if v.status != "ok" {
                under += 1;
            }
            row.push(v.value());
        }
        lhs.push(row);
    }
    let base = WeightedFit {
        n,
        p: pd,
        q: qd,
        k,
        branch: String::new(),
        radii: radii.to_vec(),
        constant: None,
        per_radius: vec![None; radii.len()],
        residual: 0.0,
        closed_form: weighted_constant(k, pd, qd, n),
        under_resolved: under,
    };
    if k < qd {
        let m = lhs.iter().map(|r| max_abs(r)).fold(0.0, f64::max);
        return Ok(WeightedFit { branch: "vanishing".into(), residual: m, ..base });
    }
    let j = k - qd;
    let order = gamma as f64 - 1.0;
    let shape: Vec<Complex64> = probes.iter().map(|z| pc.eval(z) * phi_radial(j, order, norm(z))).collect();
    let scale = lhs.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max).max(1.0);
    if shape.iter().all(|s| s.norm() <= 1e-12 * scale) {
        return Err(Error::ProbeSet("P(z) phi(z) vanishes at every probe".into()));
    }
    let radial = |t: f64| (2.0 * PI).powi(-(n as i32)) * t.powi(2 * (pd + qd) as i32) * phi_radial(j, order, t);
    let mut all_l = Vec::new();
    let mut all_b = Vec::new();
    let mut per_radius = Vec::new();
    for (row, &t) in lhs.iter().zip(radii) {
        let b: Vec<Complex64> = shape.iter().map(|s| s * radial(t)).collect();
        per_radius.push(fit_scalar(row, &b).map(|(c, _)| c));
        all_l.extend_from_slice(row);
        all_b.extend(b);
    }
    let (c, res) = fit_scalar(&all_l, &all_b).ok_or_else(|| Error::ProbeSet("model vanishes at every radius".into()))?;
    Ok(WeightedFit { branch: "nonzero".into(), constant: Some(c), per_radius, residual: res, ..base })
}

#[derive(Clone, Debug, Serialize)]
pub struct Calibration {
    pub n: usize,
    pub p: usize,
    pub q: usize,
    pub k: usize,
    pub constant: f64,
    pub uncertainty: f64,
    pub radii: Vec<f64>,
    /// Constants fitted per (radius, probe set).
    pub samples: Vec<f64>,
    pub max_fit_residual: f64,
    pub closed_form: f64,
}

impl Calibration {
    /// `C` of the convolution identity with roles of `p` and `q` exchanged:
    /// `|S^{2n-1}|` times this constant.
    pub fn as_hecke_bochner(&self) -> f64 {
        sphere_area(self.n) * self.constant
    }
}

/// Two disjoint deterministic probe sets inside the unit-ish ball.
pub fn calibration_probes(n: usize) -> [Vec<Vec<Complex64>>; 2] {
    let c = Complex64::new;
    match n {
        1 => [
            vec![vec![c(0.6, 0.3)], vec![c(-0.4, 0.9)], vec![c(1.1, -0.5)], vec![c(-0.8, -0.7)]],
            vec![vec![c(0.2, -1.3)], vec![c(1.4, 0.6)], vec![c(-1.2, 0.2)], vec![c(0.5, 0.5)]],
        ],
        _ => [
            vec![
                vec![c(0.6, 0.3), c(-0.4, 0.5)],
                vec![c(-0.2, 0.8), c(0.7, 0.1)],
                vec![c(0.9, -0.4), c(0.3, -0.6)],
                vec![c(-0.5, -0.6), c(-0.8, 0.4)],
            ],
            vec![
                vec![c(0.3, -0.9), c(0.5, 0.7)],
                vec![c(1.0, 0.2), c(-0.3, -0.4)],
                vec![c(-0.7, 0.1), c(0.6, -0.8)],
                vec![c(0.4, 0.6), c(0.9, 0.3)],
            ],
        ],
    }
}

/// Fits the weighted-mean constant at three radii and on two disjoint probe
/// sets; fails if the fitted values scatter by more than `threshold` (relative).
pub fn calibrate_weighted_constant(p: &BigradedPolynomial, k: usize, threshold: f64) -> Result<Calibration> {
    let n = p.n();
    let (pd, qd) = (p.p(), p.q());
    if k < qd {
        return Err(Error::invalid(format!("calibration needs k >= q (k = {k}, q = {qd})")));
    }
    let order = (n + pd + qd) as f64 - 1.0;
    let peak = phi_radial(k - qd, order, 0.0).abs();
    let radii: Vec<f64> = [0.7, 1.1, 1.6, 2.2, 2.9, 3.5, 0.45]
        .into_iter()
        .filter(|&t| phi_radial(k - qd, order, t).abs() > 0.05 * peak)
        .take(3)
        .collect();
    if radii.len() < 3 {
        return Err(Error::ProbeSet("fewer than three radii avoid the zeros of the radial factor".into()));
    }
    let mut samples = Vec::new();
    let mut max_res = 0.0f64;
    for set in calibration_probes(n) {
        for &t in &radii {
            let fit = weighted_functional_check(p, k, &[t], &set)?;
            max_res = max_res.max(fit.residual);
            let c = fit.constant.ok_or_else(|| Error::ProbeSet(format!("no fit at radius {t}")))?;
            samples.push(c.re);
        }
    }
    let mean = samples.iter().sum::<f64>() / samples.len() as f64;
    let spread = samples.iter().map(|c| (c - mean).abs()).fold(0.0, f64::max);
    let rel = spread / mean.abs().max(1e-300);
    if rel > threshold {
        return Err(Error::Calibration { scatter: rel, threshold });
    }
    Ok(Calibration {
        n,
        p: pd,
        q: qd,
        k,
        constant: mean,
        uncertainty: spread,
        radii,
        samples,
        max_fit_residual: max_res,
        closed_form: weighted_constant(k, pd, qd, n).unwrap(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{cx, int, rat};
    use crate::harmonics::harmonic_basis;
    use crate::poly::Monomial;
    use crate::twisted::TypeField;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn b_values() {
        for n in 1..=5 {
            assert_eq!(b_coefficient(0, n), int(1));
        }
        assert_eq!(b_coefficient(1, 2), rat(1, 2));
        // B_k^n ||phi_k||^2 |S^{2n-1}| = (2 pi)^n
        for n in 1..=3 {
            for k in 0..=4 {
                let v = rat_to_f64(&b_coefficient(k, n)) * phi_norm_sq_f64(k, n) * sphere_area(n);
                assert!((v / (2.0 * PI).powi(n as i32) - 1.0).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn projection_of_phi_itself() {
        let grid = GridSpec::default_for(1).unwrap();
        let pts = vec![vec![c(0.5, 0.5)], vec![c(-1.0, 2.0)]];
        let r = radial_projection_check(&PhiField { k: 2, n: 1 }, 2, &grid, &pts).unwrap();
        assert!(r.rel_err < 1e-9);
        assert!((r.radial_inner.re - phi_norm_sq_f64(2, 1)).abs() < 1e-10);
        let bump = TypeField::radial(RadialProfile::gaussian(1.0, 0.4), 1);
        assert!(radial_projection_check(&bump, 3, &grid, &pts).unwrap().rel_err < 1e-9);
        let skew = super::super::FnField::new(1, |z: &[Complex64]| z[0] * (-z[0].norm_sqr()).exp());
        assert!(matches!(radial_projection_check(&skew, 0, &grid, &pts), Err(Error::NotRadial(_))));
    }

    #[test]
    fn hecke_bochner_n1() {
        let grid = GridSpec::default_for(1).unwrap();
        let pts = vec![vec![c(0.7, 0.4)], vec![c(-1.5, 0.9)], vec![c(2.0, -2.5)]];
        let one = cx(int(1), int(0));
        let z = BigradedPolynomial::monomial(1, Monomial::z(0), one.clone());
        let r = hecke_bochner_check(&RadialProfile::phi(0, 2), &z, 1, &grid, &pts, None).unwrap();
        assert!(r.error < 1e-9, "{r:?}");
        let r = hecke_bochner_check(&RadialProfile::phi(0, 2), &z, 0, &grid, &pts, None).unwrap();
        assert_eq!(r.branch, "vanishing");
        assert!(r.error < 1e-9);
        let zb = BigradedPolynomial::monomial(1, Monomial::zbar(0), one.clone());
        for k in 0..=3 {
            let r = hecke_bochner_check(&RadialProfile::gaussian(1.0, 1.0 / 3.0), &zb, k, &grid, &pts, None).unwrap();
            assert!(r.error < 1e-9, "k={k}: {r:?}");
        }
        // (p, q) = (0, 0) agrees with the radial projection
        let constant = BigradedPolynomial::monomial(1, Monomial::ONE, one);
        let prof = RadialProfile::gaussian(1.0, 0.3);
        let hb = hecke_bochner_check(&prof, &constant, 2, &grid, &pts, None).unwrap();
        let rp = radial_projection_check(&TypeField::radial(prof, 1), 2, &grid, &pts).unwrap();
        for (a, b) in hb.rhs.iter().zip(&rp.rhs) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn weighted_fit_and_calibration_n1() {
        let one = cx(int(1), int(0));
        let z = BigradedPolynomial::monomial(1, Monomial::z(0), one.clone());
        let probes = calibration_probes(1)[0].clone();
        let fit = weighted_functional_check(&z, 1, &[0.8, 1.7], &probes).unwrap();
        assert!(fit.residual < 1e-10, "{fit:?}");
        let c0 = fit.constant.unwrap();
        assert!((c0.re / fit.closed_form.unwrap() - 1.0).abs() < 1e-10);
        let zb = BigradedPolynomial::monomial(1, Monomial::zbar(0), one);
        let fit = weighted_functional_check(&zb, 0, &[0.8, 1.7], &probes).unwrap();
        assert_eq!(fit.branch, "vanishing");
        assert!(fit.residual < 1e-12);
        let cal = calibrate_weighted_constant(&z, 2, 1e-4).unwrap();
        assert!((cal.constant / cal.closed_form - 1.0).abs() < 1e-8);
    }

    #[test]
    fn degenerate_probes_rejected() {
        let z1 = BigradedPolynomial::monomial(2, Monomial::z(0), cx(int(1), int(0)));
        let probes = vec![vec![c(0.0, 0.0), c(0.5, 0.1)], vec![c(0.0, 0.0), c(-0.3, 0.9)]];
        assert!(matches!(weighted_functional_check(&z1, 1, &[1.0], &probes), Err(Error::ProbeSet(_))));
    }

    #[test]
    fn hecke_bochner_n2_probe() {
        let grid = GridSpec::default_for(2).unwrap();
        let pts = vec![vec![c(0.5, -0.3), c(0.2, 0.6)]];
        let b = harmonic_basis(2, 1, 1);
        let r = hecke_bochner_check(&RadialProfile::gaussian(1.0, 0.3), &b.elements[0], 2, &grid, &pts, None).unwrap();
        assert!(r.error < 1e-6, "{r:?}");
    }
}
