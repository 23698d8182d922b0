//! Laguerre polynomials `L_k^alpha`, Laguerre functions `phi_k^{n-1}` and
//! their generalized counterparts.

mod generalized;
mod zeros;

pub use generalized::{in_c_sharp, GeneralizedLaguerreSpec, RecursionResiduals};
pub use zeros::{common_zero_scan, isolate_real_roots, poly_gcd, RootInterval, ZeroScan};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{factorial_rat, int, rat_to_f64};

/// Identifies `L_k^order` together with a scale `lambda`.
#[derive(Clone, Debug, PartialEq)]
pub struct LaguerreSpec {
    pub k: usize,
    pub order: BigRational,
    pub lambda: BigRational,
}

impl LaguerreSpec {
    pub fn new(k: usize, order: BigRational, lambda: BigRational) -> Result<Self> {
        if lambda.is_zero() {
            return Err(Error::invalid("scale lambda must be nonzero"));
        }
        Ok(LaguerreSpec { k, order, lambda })
    }

    pub fn lambda_is_negative(&self) -> bool {
        self.lambda.is_negative()
    }

    pub fn coeffs(&self) -> Vec<BigRational> {
        laguerre_coeffs(self.k, &self.order)
    }

    pub fn eval(&self, x: f64) -> f64 {
        laguerre_eval(self.k, rat_to_f64(&self.order), x)
    }

    /// `phi_{k,lambda}` at `z` with the superscript taken from `order`.
    pub fn eval_phi(&self, z: &[Complex64]) -> f64 {
        let s = rat_to_f64(&self.lambda.abs());
        let r2 = s * norm_sq(z);
        self.eval(r2 / 2.0) * (-r2 / 4.0).exp()
    }
}

/// Coefficients of `L_k^order`, lowest power first:
/// `(-1)^i binom(order + k, k - i) / i!`.
pub fn laguerre_coeffs(k: usize, order: &BigRational) -> Vec<BigRational> {
    (0..=k)
        .map(|i| {
            let mut b = BigRational::one();
            for m in 1..=(k - i) {
                b = b * (order + int((i + m) as i64)) / int(m as i64);
            }
            let c = b / factorial_rat(i as u64);
            if i % 2 == 1 {
                -c
            } else {
                c
            }
        })
        .collect()
}

/// Integer-order shortcut.
pub fn laguerre_coeffs_int(k: usize, order: usize) -> Vec<BigRational> {
    laguerre_coeffs(k, &BigRational::from_integer(BigInt::from(order)))
}

/// `L_k^alpha(x)` by the three-term recurrence.
pub fn laguerre_eval(k: usize, alpha: f64, x: f64) -> f64 {
    let mut l0 = 1.0;
    if k == 0 {
        return l0;
    }
    let mut l1 = 1.0 + alpha - x;
    for j in 1..k {
        let jf = j as f64;
        let l2 = ((2.0 * jf + 1.0 + alpha - x) * l1 - (jf + alpha) * l0) / (jf + 1.0);
        l0 = l1;
        l1 = l2;
    }
    l1
}

/// `phi_k^{order}` as a function of the radius: `L_k^order(r^2/2) e^{-r^2/4}`.
pub fn phi_radial(k: usize, order: f64, r: f64) -> f64 {
    let r2 = r * r;
    laguerre_eval(k, order, r2 / 2.0) * (-r2 / 4.0).exp()
}

pub(crate) fn norm_sq(z: &[Complex64]) -> f64 {
    z.iter().map(|c| c.norm_sqr()).sum()
}

/// `phi_k^{n-1}(z) = L_k^{n-1}(|z|^2/2) e^{-|z|^2/4}`.
pub fn eval_phi(k: usize, n: usize, z: &[Complex64]) -> f64 {
    phi_radial(k, n as f64 - 1.0, norm_sq(z).sqrt())
}

/// `phi_{k,lambda}^{n-1}(z) = phi_k^{n-1}(sqrt(|lambda|) z)`, so the Gaussian factor is `e^{-|lambda| |z|^2/4}`.
pub fn eval_phi_scaled(k: usize, n: usize, lambda: f64, z: &[Complex64]) -> Result<f64> {
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(Error::invalid("scale lambda must be finite and nonzero"));
    }
    let s = lambda.abs();
    Ok(phi_radial(k, n as f64 - 1.0, (s * norm_sq(z)).sqrt()))
}

/// `int_0^inf |phi_k^{gamma-1}(r)|^2 r^{2 gamma - 1} dr = 2^{gamma-1} (k+gamma-1)! / k!`.
pub fn phi_norm_sq(k: usize, gamma: usize) -> BigRational {
    assert!(gamma >= 1, "gamma must be at least 1");
    let pow = BigRational::from_integer(BigInt::one() << (gamma - 1));
    pow * factorial_rat((k + gamma - 1) as u64) / factorial_rat(k as u64)
}

pub fn phi_norm_sq_f64(k: usize, gamma: usize) -> f64 {
    rat_to_f64(&phi_norm_sq(k, gamma))
}

/// Exact derivative of a coefficient list.
pub fn poly_derivative(c: &[BigRational]) -> Vec<BigRational> {
    c.iter().enumerate().skip(1).map(|(i, v)| v * int(i as i64)).collect()
}

/// Exact sum of coefficient lists with the given signs.
pub fn poly_combine(terms: &[(&[BigRational], i64)]) -> Vec<BigRational> {
    let len = terms.iter().map(|(c, _)| c.len()).max().unwrap_or(0);
    let mut out = vec![BigRational::zero(); len];
    for (c, s) in terms {
        for (i, v) in c.iter().enumerate() {
            out[i] += v * int(*s);
        }
    }
    while out.last().is_some_and(|v| v.is_zero()) {
        out.pop();
    }
    out
}

/// Residuals of `d/dx L_k^a = -L_{k-1}^{a+1}` and
/// `L_{k-1}^{a+1} + L_k^a = L_k^{a+1}` on coefficient lists; both empty when
/// the identities hold.
pub fn recursion_residuals(k: usize, order: &BigRational) -> (Vec<BigRational>, Vec<BigRational>) {
    recursion_residuals_with(k, order, &|k, o| laguerre_coeffs(k, o))
}

/// Same as [`recursion_residuals`] with a caller-supplied coefficient table.
pub fn recursion_residuals_with(
    k: usize,
    order: &BigRational,
    table: &dyn Fn(usize, &BigRational) -> Vec<BigRational>,
) -> (Vec<BigRational>, Vec<BigRational>) {
    let next = order + BigRational::one();
    let lk = table(k, order);
    let lk_up = table(k, &next);
    let lkm1_up = if k == 0 { Vec::new() } else { table(k - 1, &next) };
    let deriv = poly_combine(&[(&poly_derivative(&lk), 1), (&lkm1_up, 1)]);
    let sum = poly_combine(&[(&lkm1_up, 1), (&lk, 1), (&lk_up, -1)]);
    (deriv, sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use crate::quadrature::RadialRule;

    #[test]
    fn coefficient_examples() {
        assert_eq!(laguerre_coeffs(0, &rat(7, 3)), vec![int(1)]);
        assert_eq!(laguerre_coeffs_int(1, 1), vec![int(2), int(-1)]);
        assert_eq!(laguerre_coeffs_int(2, 0), vec![int(1), int(-2), rat(1, 2)]);
    }

    #[test]
    fn leading_coefficient() {
        for k in 0..10 {
            let c = laguerre_coeffs(k, &rat(3, 2));
            assert_eq!(c.len(), k + 1);
            let expect = if k % 2 == 0 { int(1) } else { int(-1) } / factorial_rat(k as u64);
            assert_eq!(c[k], expect);
        }
    }

    #[test]
    fn recurrence_matches_coefficients() {
        for k in 0..12 {
            for a in [0.0, 1.0, 2.5] {
                let c = laguerre_coeffs(k, &rat((a * 2.0) as i64, 2));
                for x in [0.0f64, 0.7, 3.0, 11.0] {
                    let direct: f64 = c.iter().enumerate().map(|(i, v)| rat_to_f64(v) * x.powi(i as i32)).sum();
                    let rec = laguerre_eval(k, a, x);
                    assert!((direct - rec).abs() <= 1e-9 * (1.0 + direct.abs()), "k={k} a={a} x={x}");
                }
            }
        }
    }

    #[test]
    fn phi_examples() {
        let z0 = [Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)];
        assert_eq!(eval_phi(0, 2, &z0), 1.0);
        let z = [Complex64::new(1.0, 1.0)];
        assert!(eval_phi(1, 1, &z).abs() < 1e-15);
        // value at the origin is binom(k+n-1, k)
        assert!((eval_phi(4, 3, &z0) - 15.0).abs() < 1e-12);
        let z1 = [Complex64::new(0.6, 0.8)];
        assert!((eval_phi_scaled(0, 1, 2.0, &z1).unwrap() - (-0.5f64).exp()).abs() < 1e-15);
        assert!(eval_phi_scaled(0, 1, 0.0, &z1).is_err());
    }

    #[test]
    fn norm_formula_against_quadrature() {
        assert_eq!(phi_norm_sq(0, 1), int(1));
        assert_eq!(phi_norm_sq(0, 2), int(2));
        assert_eq!(phi_norm_sq(2, 3), int(48));
        let rule = RadialRule::default();
        for g in 1..=6 {
            for j in 0..=8 {
                for k in 0..=8 {
                    let v = rule.integrate(g as f64, |r| phi_radial(j, g as f64 - 1.0, r) * phi_radial(k, g as f64 - 1.0, r));
                    let want = if j == k { phi_norm_sq_f64(k, g) } else { 0.0 };
                    let scale = phi_norm_sq_f64(k, g).max(phi_norm_sq_f64(j, g));
                    assert!((v - want).abs() <= 1e-10 * scale, "g={g} j={j} k={k}: {v} vs {want}");
                }
            }
        }
    }

    #[test]
    fn recursions_exact() {
        for k in 0..=12 {
            for o in 0..=8 {
                let (d, s) = recursion_residuals(k, &int(o));
                assert!(d.is_empty() && s.is_empty(), "k={k} order={o}");
            }
        }
    }
}
