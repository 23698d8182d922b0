//! Quadrature for twisted convolutions and twisted spherical means, and
//! numerical checks of the convolution-level identities.
//!
//! The twisted convolution at scale `lambda` is
//! `f x g (z) = int f(z - w) g(w) exp((i lambda / 2) Im(z . conj w)) dw`.

mod checks;
mod grid;
mod heisenberg;

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use serde::Serialize;

pub use checks::{
    b_coefficient, calibrate_weighted_constant, calibration_probes, hecke_bochner_check, hecke_bochner_constant, radial_projection_check,
    weighted_constant, weighted_functional_check, Calibration, HeckeBochnerReport, ProjectionCheck, WeightedFit,
};
pub use grid::{Field, FnField, GridFunction, GridSpec, Precision};
pub use heisenberg::{default_probes, heisenberg_slice_demo, separable_gaussian, HeisenbergDemo, SliceGrid};

use crate::error::{Error, Result};
use crate::harmonics::{BigradedPolynomial, SphereRule};
use crate::laguerre::{eval_phi, phi_radial};
use crate::par;
use crate::poly::Poly;
use crate::quadrature::{circle_nodes, RadialRule};

/// Largest integrand modulus allowed on the edge of the box, relative to
/// the peak, before truncation is considered unsafe.
pub const TRUNCATION_TOL: f64 = 1e-6;

/// `exp((i lambda / 2) Im(z . conj w))`.
pub fn twist_phase(lambda: f64, z: &[Complex64], w: &[Complex64]) -> Complex64 {
    let im: f64 = z.iter().zip(w).map(|(a, b)| (a * b.conj()).im).sum();
    Complex64::from_polar(1.0, 0.5 * lambda * im)
}

/// `phi_k^{n-1}(z) = L_k^{n-1}(|z|^2/2) e^{-|z|^2/4}` on `C^n`.
#[derive(Clone, Copy, Debug)]
pub struct PhiField {
    pub k: usize,
    pub n: usize,
}

impl Field for PhiField {
    fn dim(&self) -> usize {
        self.n
    }
    fn eval(&self, z: &[Complex64]) -> Complex64 {
        Complex64::new(eval_phi(self.k, self.n, z), 0.0)
    }
}

type ProfileFn = dyn Fn(f64) -> f64 + Send + Sync;

/// A real radial profile `a(r)` with cached Laguerre inner products.
#[derive(Clone)]
pub struct RadialProfile {
    tag: String,
    f: Arc<ProfileFn>,
    cache: Arc<Mutex<HashMap<(usize, usize), f64>>>,
}

impl std::fmt::Debug for RadialProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RadialProfile").field("tag", &self.tag).finish()
    }
}

impl RadialProfile {
    pub fn new(tag: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        RadialProfile { tag: tag.into(), f: Arc::new(f), cache: Arc::default() }
    }

    /// `r -> phi_k^{order}(r)`.
    pub fn phi(k: usize, order: usize) -> Self {
        Self::new(format!("phi_{k}^{order}"), move |r| phi_radial(k, order as f64, r))
    }

    /// `r -> c exp(-a r^2)`.
    pub fn gaussian(c: f64, a: f64) -> Self {
        Self::new(format!("{c}*exp(-{a} r^2)"), move |r| c * (-a * r * r).exp())
    }

    pub fn zero() -> Self {
        Self::new("0", |_| 0.0)
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn eval(&self, r: f64) -> f64 {
        (self.f)(r)
    }

    /// `int_0^inf a(r) phi_j^{gamma-1}(r) r^{2 gamma - 1} dr`.
    pub fn inner(&self, j: usize, gamma: usize) -> f64 {
        if let Some(v) = self.cache.lock().unwrap().get(&(j, gamma)) {
            return *v;
        }
        let v = self.inner_with(&RadialRule::default(), j, gamma);
        self.cache.lock().unwrap().insert((j, gamma), v);
        v
    }

    pub fn inner_with(&self, rule: &RadialRule, j: usize, gamma: usize) -> f64 {
        rule.integrate(gamma as f64, |r| self.eval(r) * phi_radial(j, gamma as f64 - 1.0, r))
    }

    /// `int_0^inf |a(r)|^2 r^{2 gamma - 1} dr`.
    pub fn norm_sq(&self, gamma: usize) -> f64 {
        RadialRule::default().integrate(gamma as f64, |r| self.eval(r).powi(2))
    }
}

/// A type function `a(|z|) P(z)`.
#[derive(Clone, Debug)]
pub struct TypeField {
    pub profile: RadialProfile,
    pub poly: Poly<Complex64>,
}

impl TypeField {
    pub fn new(profile: RadialProfile, p: &BigradedPolynomial) -> Self {
        TypeField { profile, poly: p.to_c64() }
    }

    pub fn radial(profile: RadialProfile, n: usize) -> Self {
        TypeField { profile, poly: Poly::constant(n, Complex64::new(1.0, 0.0)) }
    }
}

impl Field for TypeField {
    fn dim(&self) -> usize {
        self.poly.dim()
    }
    fn eval(&self, z: &[Complex64]) -> Complex64 {
        let r = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        self.poly.eval(z) * self.profile.eval(r)
    }
}

/// A finite sum of fields.
pub struct SumField<'a> {
    pub n: usize,
    pub parts: Vec<&'a dyn Field>,
}

impl Field for SumField<'_> {
    fn dim(&self) -> usize {
        self.n
    }
    fn eval(&self, z: &[Complex64]) -> Complex64 {
        self.parts.iter().map(|f| f.eval(z)).sum()
    }
}

pub(crate) fn check_points(grid: &GridSpec, points: &[Vec<Complex64>]) -> Result<()> {
    let limit = grid.extent / 2.0;
    for z in points {
        if z.len() != grid.n {
            return Err(Error::DimensionMismatch { expected: grid.n, got: z.len() });
        }
        if z.iter().any(|c| c.re.abs() > limit || c.im.abs() > limit) {
            return Err(Error::Domain { point: format!("{z:?}"), limit });
        }
    }
    Ok(())
}

/// Trapezoid quadrature of `f x_lambda g` at each point, with nodes on `grid`.
///
/// `f(z - w)` is evaluated through [`Field::eval`] (exact for closed forms,
/// multilinear for grid functions). Points must lie in `[-L/2, L/2]^{2n}`;
/// an integrand that has not decayed at the box edge is refused.
pub fn twisted_convolution(
    f: &dyn Field,
    g: &dyn Field,
    grid: &GridSpec,
    lambda: f64,
    points: &[Vec<Complex64>],
) -> Result<Vec<Complex64>> {
    for d in [f.dim(), g.dim()] {
        if d != grid.n {
            return Err(Error::DimensionMismatch { expected: grid.n, got: d });
        }
    }
    check_points(grid, points)?;
    let g_vals = par::map_range(grid.len(), |i| {
        let mut w = [Complex64::new(0.0, 0.0); 2];
        grid.node(i, &mut w[..grid.n]);
        g.eval(&w[..grid.n])
    });
    if let Some(i) = g_vals.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::NonFinite(format!("second factor at node {i}")));
    }
    convolve_with_samples(f, &g_vals, grid, lambda, points)
}

fn convolve_with_samples(
    f: &dyn Field,
    g_vals: &[Complex64],
    grid: &GridSpec,
    lambda: f64,
    points: &[Vec<Complex64>],
) -> Result<Vec<Complex64>> {
    let n = grid.n;
    let dv = grid.cell_volume();
    let rows = par::map(points, |z| {
        let mut w = [Complex64::new(0.0, 0.0); 2];
        let mut d = [Complex64::new(0.0, 0.0); 2];
        let mut acc = Complex64::new(0.0, 0.0);
        let (mut peak, mut edge) = (0.0f64, 0.0f64);
        for (i, gv) in g_vals.iter().enumerate() {
            if *gv == Complex64::new(0.0, 0.0) {
                continue;
            }
            grid.node(i, &mut w[..n]);
            for j in 0..n {
                d[j] = z[j] - w[j];
            }
            let v = f.eval(&d[..n]) * gv * twist_phase(lambda, z, &w[..n]);
            let m = v.norm();
            peak = peak.max(m);
            if m > edge && grid.on_boundary(i) {
                edge = m;
            }
            acc += v;
        }
        (acc * dv, peak, edge)
    });
    let mut out = Vec::with_capacity(rows.len());
    for (z, (v, peak, edge)) in points.iter().zip(rows) {
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::NonFinite(format!("convolution at {z:?}")));
        }
        if peak > 0.0 && edge > TRUNCATION_TOL * peak {
            return Err(Error::Decay(format!(
                "integrand at the box edge is {:.2e} of its peak for z = {z:?} (limit {TRUNCATION_TOL:e})",
                edge / peak
            )));
        }
        out.push(v);
    }
    Ok(out)
}

/// Twisted convolution of two grid functions sharing one geometry.
pub fn convolve_grids(f: &GridFunction, g: &GridFunction, lambda: f64, points: &[Vec<Complex64>]) -> Result<Vec<Complex64>> {
    if f.spec != g.spec {
        return Err(Error::invalid("grid functions must share extent, steps and dimension"));
    }
    check_points(&f.spec, points)?;
    convolve_with_samples(f, &g.samples, &f.spec, lambda, points)
}

/// Normalized surface measure on `S_r(center)`, optionally weighted by `P`.
#[derive(Clone, Debug)]
pub struct SphereMeasureSpec {
    pub center: Vec<Complex64>,
    pub radius: f64,
    pub phase_nodes: usize,
    pub latitude_nodes: usize,
    pub weight: Option<BigradedPolynomial>,
}

impl SphereMeasureSpec {
    pub fn centered(n: usize, radius: f64, phase_nodes: usize, latitude_nodes: usize) -> Self {
        SphereMeasureSpec { center: vec![Complex64::new(0.0, 0.0); n], radius, phase_nodes, latitude_nodes, weight: None }
    }

    /// Node counts that resolve the integrand at `z` for a unit-bandwidth `f`.
    pub fn resolved(n: usize, radius: f64, z_norm: f64) -> Self {
        let m = min_phase_nodes(radius, z_norm).max(32);
        Self::centered(n, radius, m, m / 2 + 4)
    }

    pub fn with_weight(mut self, p: BigradedPolynomial) -> Self {
        self.weight = Some(p);
        self
    }

    pub fn n(&self) -> usize {
        self.center.len()
    }
}

/// Minimum trapezoid nodes per circle for the spherical quadrature.
pub fn min_phase_nodes(radius: f64, z_norm: f64) -> usize {
    8 + (4.0 * radius * (1.0 + z_norm)).ceil() as usize
}

#[derive(Clone, Debug, Serialize)]
pub struct TsmValue {
    pub re: f64,
    pub im: f64,
    pub status: String,
    pub nodes: usize,
    pub min_nodes: usize,
}

impl TsmValue {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// `int f(z - w) P(w - c) exp((i/2) Im(z . conj w)) dmu_r(w)` over `S_r(c)`.
pub fn twisted_spherical_mean(f: &dyn Field, spec: &SphereMeasureSpec, z: &[Complex64]) -> Result<TsmValue> {
    let n = spec.n();
    if f.dim() != n || z.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: if f.dim() != n { f.dim() } else { z.len() } });
    }
    if !(spec.radius > 0.0 && spec.radius.is_finite()) {
        return Err(Error::invalid(format!("radius must be positive, got {}", spec.radius)));
    }
    let rule = match n {
        1 => SphereRule {
            n: 1,
            points: circle_nodes(spec.phase_nodes.max(1)).iter().map(|t| vec![Complex64::from_polar(1.0, *t)]).collect(),
            weights: vec![1.0 / spec.phase_nodes.max(1) as f64; spec.phase_nodes.max(1)],
        },
        _ => SphereRule::new(n, spec.phase_nodes, spec.latitude_nodes)?,
    };
    let weight = spec.weight.as_ref().map(|p| p.to_c64());
    let mut w = vec![Complex64::new(0.0, 0.0); n];
    let mut d = vec![Complex64::new(0.0, 0.0); n];
    let mut acc = Complex64::new(0.0, 0.0);
    for (omega, wt) in rule.points.iter().zip(&rule.weights) {
        for j in 0..n {
            let local = omega[j] * spec.radius;
            w[j] = spec.center[j] + local;
            d[j] = z[j] - w[j];
        }
        let mut v = f.eval(&d) * twist_phase(1.0, z, &w);
        if let Some(p) = &weight {
            let local: Vec<Complex64> = omega.iter().map(|o| o * spec.radius).collect();
            v *= p.eval(&local);
        }
        acc += v * *wt;
    }
    if !acc.re.is_finite() || !acc.im.is_finite() {
        return Err(Error::NonFinite("spherical mean".into()));
    }
    let z_norm = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let min_nodes = min_phase_nodes(spec.radius, z_norm);
    let resolved = spec.phase_nodes >= min_nodes && (n == 1 || spec.latitude_nodes >= min_nodes / 2);
    Ok(TsmValue {
        re: acc.re,
        im: acc.im,
        status: if resolved { "ok" } else { "under_resolved" }.into(),
        nodes: rule.points.len(),
        min_nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{cx, int};
    use crate::poly::Monomial;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn ground_state_self_convolution() {
        let grid = GridSpec::default_for(1).unwrap();
        let phi0 = PhiField { k: 0, n: 1 };
        let v = twisted_convolution(&phi0, &phi0, &grid, 1.0, &[vec![c(0.0, 0.0)]]).unwrap();
        assert!((v[0] - c(2.0 * PI, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn orthogonal_pair_vanishes() {
        let grid = GridSpec::default_for(1).unwrap();
        let pts: Vec<_> = [(0.0, 0.0), (1.0, 0.5), (-2.0, 1.0), (0.3, -3.0), (4.0, 4.0)].iter().map(|&(a, b)| vec![c(a, b)]).collect();
        let v = twisted_convolution(&PhiField { k: 0, n: 1 }, &PhiField { k: 1, n: 1 }, &grid, 1.0, &pts).unwrap();
        assert!(v.iter().all(|x| x.norm() < 1e-9), "{v:?}");
    }

    #[test]
    fn conjugate_symmetry_in_lambda() {
        let grid = GridSpec::new(1, 10.0, 96).unwrap();
        let f = TypeField::radial(RadialProfile::gaussian(1.0, 0.3), 1);
        let g = PhiField { k: 2, n: 1 };
        let pts = vec![vec![c(0.7, -1.2)], vec![c(2.0, 0.5)]];
        let a = twisted_convolution(&f, &g, &grid, 1.0, &pts).unwrap();
        let b = twisted_convolution(&f, &g, &grid, -1.0, &pts).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x.conj() - y).norm() < 1e-12);
        }
    }

    #[test]
    fn domain_and_decay_errors() {
        let grid = GridSpec::new(1, 4.0, 32).unwrap();
        let phi = PhiField { k: 0, n: 1 };
        assert!(matches!(twisted_convolution(&phi, &phi, &grid, 1.0, &[vec![c(2.5, 0.0)]]), Err(Error::Domain { .. })));
        let flat = FnField::new(1, |_: &[Complex64]| c(1.0, 0.0));
        assert!(matches!(twisted_convolution(&flat, &flat, &grid, 1.0, &[vec![c(0.0, 0.0)]]), Err(Error::Decay(_))));
    }

    #[test]
    fn bilinear_in_each_factor() {
        let grid = GridSpec::new(1, 8.0, 64).unwrap();
        let a = PhiField { k: 1, n: 1 };
        let b = TypeField::radial(RadialProfile::gaussian(1.0, 0.5), 1);
        let s = SumField { n: 1, parts: vec![&a, &b] };
        let g = PhiField { k: 1, n: 1 };
        let pts = vec![vec![c(0.4, 0.9)]];
        let lhs = twisted_convolution(&s, &g, &grid, 1.0, &pts).unwrap()[0];
        let rhs = twisted_convolution(&a, &g, &grid, 1.0, &pts).unwrap()[0] + twisted_convolution(&b, &g, &grid, 1.0, &pts).unwrap()[0];
        assert!((lhs - rhs).norm() < 1e-13);
    }

    #[test]
    fn tsm_examples() {
        let one = FnField::new(2, |_: &[Complex64]| c(1.0, 0.0));
        let z0 = [c(0.0, 0.0), c(0.0, 0.0)];
        let v = twisted_spherical_mean(&one, &SphereMeasureSpec::resolved(2, 1.3, 0.0), &z0).unwrap();
        assert!((v.value() - c(1.0, 0.0)).norm() < 1e-11, "{v:?}");
        let gauss = TypeField::radial(RadialProfile::gaussian(1.0, 0.25), 2);
        let z1 = BigradedPolynomial::monomial(2, Monomial::z(0), cx(int(1), int(0)));
        let spec = SphereMeasureSpec::resolved(2, 0.8, 0.0).with_weight(z1);
        assert!(twisted_spherical_mean(&gauss, &spec, &z0).unwrap().value().norm() < 1e-13);
        let radial = TypeField::radial(RadialProfile::phi(2, 1), 2);
        let v = twisted_spherical_mean(&radial, &SphereMeasureSpec::resolved(2, 1.7, 0.0), &z0).unwrap();
        assert!(v.im.abs() < 1e-10);
        let coarse = twisted_spherical_mean(&radial, &SphereMeasureSpec::centered(2, 3.0, 4, 2), &z0).unwrap();
        assert_eq!(coarse.status, "under_resolved");
    }

    #[test]
    fn profile_inner_products_are_stable_under_refinement() {
        let fine = RadialRule { order: 32, panel_width: 0.5, max_u: 4000.0 };
        for prof in [RadialProfile::gaussian(1.0, 0.2), RadialProfile::phi(3, 2), RadialProfile::gaussian(2.0, 1.5)] {
            for g in 1..=4 {
                for j in 0..=5 {
                    let a = prof.inner(j, g);
                    let b = prof.inner_with(&fine, j, g);
                    // relative to the Cauchy-Schwarz scale when the inner product vanishes
                    let scale = a.abs().max((prof.norm_sq(g) * crate::laguerre::phi_norm_sq_f64(j, g)).sqrt());
                    assert!((a - b).abs() <= 1e-10 * scale, "{} j={j} g={g}: {a} {b}", prof.tag());
                }
            }
        }
    }
}
