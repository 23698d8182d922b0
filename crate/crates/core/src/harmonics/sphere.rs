use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{dim_hpq, BigradedPolynomial, HarmonicBasis};
use crate::error::{Error, Result};
use crate::exact::rat_to_f64;
use crate::quadrature::{circle_nodes, gauss_legendre};

/// Quadrature for the normalized surface measure on the unit sphere of `C^n`.
///
/// `n = 1`: trapezoid on the circle. `n = 2`: writing
/// `z = (sqrt(1-u) e^{i a}, sqrt(u) e^{i b})`, the normalized measure is
/// `du da db / (2 pi)^2` on `[0,1] x [0,2pi)^2`; Gauss-Legendre in `u`,
/// trapezoid in the phases.
#[derive(Clone, Debug)]
pub struct SphereRule {
    pub n: usize,
    pub points: Vec<Vec<Complex64>>,
    pub weights: Vec<f64>,
}

impl SphereRule {
    pub fn new(n: usize, phase_nodes: usize, latitude_nodes: usize) -> Result<Self> {
        let phases = circle_nodes(phase_nodes.max(1));
        match n {
            1 => {
                let w = 1.0 / phases.len() as f64;
                Ok(SphereRule {
                    n,
                    points: phases.iter().map(|t| vec![Complex64::from_polar(1.0, *t)]).collect(),
                    weights: vec![w; phases.len()],
                })
            }
            2 => {
                let (x, wx) = gauss_legendre(latitude_nodes.max(1));
                let mut points = Vec::new();
                let mut weights = Vec::new();
                let pw = 1.0 / (phases.len() * phases.len()) as f64;
                for (xi, wi) in x.iter().zip(&wx) {
                    let u = 0.5 * (xi + 1.0);
                    let (s0, s1) = ((1.0 - u).sqrt(), u.sqrt());
                    for a in &phases {
                        for b in &phases {
                            points.push(vec![Complex64::from_polar(s0, *a), Complex64::from_polar(s1, *b)]);
                            weights.push(0.5 * wi * pw);
                        }
                    }
                }
                Ok(SphereRule { n, points, weights })
            }
            _ => Err(Error::invalid(format!("sphere quadrature is implemented for n <= 2, got n = {n}"))),
        }
    }

    /// A rule exact for polynomial integrands of total degree `d` in `(z, zbar)`.
    pub fn for_degree(n: usize, d: usize) -> Result<Self> {
        Self::new(n, d + 2, d / 2 + 2)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `int f dsigma` over the sphere of radius `r` centred at the origin.
    pub fn integrate(&self, r: f64, f: impl Fn(&[Complex64]) -> Complex64) -> Complex64 {
        let mut buf = vec![Complex64::new(0.0, 0.0); self.n];
        let mut acc = Complex64::new(0.0, 0.0);
        for (p, w) in self.points.iter().zip(&self.weights) {
            for (b, v) in buf.iter_mut().zip(p) {
                *b = v * r;
            }
            acc += f(&buf) * *w;
        }
        acc
    }
}

/// Outcome of the sampled sup-norm comparison.
#[derive(Clone, Debug, Serialize)]
pub struct SupNormCheck {
    pub sup_estimate: f64,
    pub coefficient_norm: f64,
    pub dimension: String,
    pub bound: f64,
    pub samples: usize,
    pub pass: bool,
}

fn sphere_samples(n: usize, count: usize, seed: u64) -> Vec<Vec<Complex64>> {
    match n {
        1 => circle_nodes(count).iter().map(|t| vec![Complex64::from_polar(1.0, *t)]).collect(),
        2 => {
            // quasi-uniform: equispaced u including both poles, equispaced phases
            let side = ((count as f64).cbrt().ceil() as usize).max(5) | 1;
            let phases = circle_nodes(side);
            let mut out = Vec::new();
            for i in 0..side {
                let u = i as f64 / (side - 1) as f64;
                for a in &phases {
                    for b in &phases {
                        out.push(vec![Complex64::from_polar((1.0 - u).sqrt(), *a), Complex64::from_polar(u.sqrt(), *b)]);
                    }
                }
            }
            out.extend(random_sphere_points(2, count / 4, seed));
            out
        }
        _ => random_sphere_points(n, count, seed),
    }
}

/// Seeded points uniformly distributed on the unit sphere of `C^n`.
pub fn random_sphere_points(n: usize, count: usize, seed: u64) -> Vec<Vec<Complex64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gauss = move || {
        let u1: f64 = rng.gen::<f64>().max(1e-300);
        let u2: f64 = rng.gen();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    };
    (0..count)
        .map(|_| {
            let v: Vec<Complex64> = (0..n).map(|_| Complex64::new(gauss(), gauss())).collect();
            let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            v.into_iter().map(|c| c / norm).collect()
        })
        .collect()
}

/// Samples `|P|` on the unit sphere (at least `10^4` points) and compares
/// with `sqrt(dim H_{p,q}) * sqrt(sum |c|^2 alpha! beta!)`.
pub fn sup_norm_bound_check(p: &BigradedPolynomial, seed: u64) -> Result<SupNormCheck> {
    if p.is_zero() {
        return Err(Error::invalid("sup-norm check needs a nonzero polynomial"));
    }
    let pc = p.to_c64();
    let pts = sphere_samples(p.n(), 10_000, seed);
    let sup = pts.iter().map(|z| pc.eval(z).norm()).fold(0.0, f64::max);
    let dim: BigUint = dim_hpq(p.n(), p.p(), p.q());
    let cn = rat_to_f64(&p.sphere_l2_norm()).sqrt();
    let bound = dim.to_f64().unwrap_or(f64::INFINITY).sqrt() * cn;
    Ok(SupNormCheck {
        sup_estimate: sup,
        coefficient_norm: cn,
        dimension: dim.to_string(),
        bound,
        samples: pts.len(),
        pass: sup <= bound * (1.0 + 1e-12),
    })
}

/// `a_j(rho) = <f(rho .), Y_j> / ||Y_j||^2` on the unit sphere, one row per radius.
pub fn sph_coefficients(
    f: &(dyn Fn(&[Complex64]) -> Complex64 + Sync),
    basis: &HarmonicBasis,
    radii: &[f64],
    rule: &SphereRule,
) -> Result<Vec<Vec<Complex64>>> {
    if rule.n != basis.n {
        return Err(Error::DimensionMismatch { expected: basis.n, got: rule.n });
    }
    let mut buf = vec![Complex64::new(0.0, 0.0); rule.n];
    let mut samples = Vec::with_capacity(radii.len());
    for &rho in radii {
        let row: Vec<Complex64> = rule
            .points
            .iter()
            .map(|w| {
                for (b, v) in buf.iter_mut().zip(w) {
                    *b = v * rho;
                }
                f(&buf)
            })
            .collect();
        if row.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite(format!("spherical samples at radius {rho}")));
        }
        samples.push(row);
    }
    sph_coefficients_sampled(&samples, basis, rule)
}

/// Same as [`sph_coefficients`] for samples already taken at the rule's
/// points (one row per radius).
pub fn sph_coefficients_sampled(samples: &[Vec<Complex64>], basis: &HarmonicBasis, rule: &SphereRule) -> Result<Vec<Vec<Complex64>>> {
    if rule.n != basis.n {
        return Err(Error::DimensionMismatch { expected: basis.n, got: rule.n });
    }
    if let Some(row) = samples.iter().find(|r| r.len() != rule.len()) {
        return Err(Error::DimensionMismatch { expected: rule.len(), got: row.len() });
    }
    // conj(Y_j(w)) w_m / ||Y_j||^2, folded into one weight row per element
    let rows: Vec<Vec<Complex64>> = basis
        .elements
        .iter()
        .map(|e| {
            let y = e.to_c64();
            let nrm = e.normalized_sphere_norm_sq();
            rule.points.iter().zip(&rule.weights).map(|(w, wt)| y.eval(w).conj() * (*wt / nrm)).collect()
        })
        .collect();
    Ok(samples
        .iter()
        .map(|s| rows.iter().map(|yw| s.iter().zip(yw).map(|(a, b)| a * b).sum()).collect())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{cx, int};
    use crate::harmonics::harmonic_basis;
    use crate::poly::Monomial;

    #[test]
    fn weights_sum_to_one() {
        for n in 1..=2 {
            let r = SphereRule::new(n, 12, 7).unwrap();
            assert!((r.weights.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn normalized_norm_formula_matches_quadrature() {
        for n in 1..=2 {
            for p in 0..=3 {
                for q in 0..=3 {
                    let b = harmonic_basis(n, p, q);
                    let rule = SphereRule::for_degree(n, 2 * (p + q)).unwrap();
                    for e in &b.elements {
                        let pc = e.to_c64();
                        let v = rule.integrate(1.0, |z| Complex64::new(pc.eval(z).norm_sqr(), 0.0)).re;
                        let w = e.normalized_sphere_norm_sq();
                        assert!((v - w).abs() < 1e-12 * w, "n={n} p={p} q={q}: {v} vs {w}");
                    }
                }
            }
        }
    }

    #[test]
    fn sup_examples() {
        let c1 = cx(int(1), int(0));
        let z1 = BigradedPolynomial::monomial(2, Monomial::z(0), c1.clone());
        let r = sup_norm_bound_check(&z1, 1).unwrap();
        assert!((r.sup_estimate - 1.0).abs() < 1e-9 && r.pass);
        let p = BigradedPolynomial::monomial(2, Monomial::new([1, 0, 0, 0], [0, 1, 0, 0]), c1);
        let r = sup_norm_bound_check(&p, 1).unwrap();
        assert!((r.sup_estimate - 0.5).abs() < 1e-3 && r.pass);
        assert!(r.samples >= 10_000);
        assert!(sup_norm_bound_check(&BigradedPolynomial::zero(2, 1, 1), 1).is_err());
    }

    #[test]
    fn coefficients_of_planted_type_function() {
        let rule = SphereRule::for_degree(2, 8).unwrap();
        let f = |z: &[Complex64]| z[0] * (-(z[0].norm_sqr() + z[1].norm_sqr()) / 4.0).exp();
        for p in 0..=2 {
            for q in 0..=2 {
                let b = harmonic_basis(2, p, q);
                let a = sph_coefficients(&f, &b, &[0.5, 1.5], &rule).unwrap();
                for (row, rho) in a.iter().zip([0.5f64, 1.5]) {
                    for (j, v) in row.iter().enumerate() {
                        let e = &b.elements[j];
                        let want = if (p, q) == (1, 0) {
                            // <z_1, Y> / ||Y||^2 on the unit sphere, times rho e^{-rho^2/4}
                            let y = e.to_c64();
                            let c = y.coefficient(&Monomial::z(0)).conj();
                            c * 0.5 / e.normalized_sphere_norm_sq() * rho * (-rho * rho / 4.0).exp()
                        } else {
                            Complex64::new(0.0, 0.0)
                        };
                        assert!((v - want).norm() < 1e-12, "p={p} q={q}: {v} vs {want}");
                    }
                }
            }
        }
    }
}
