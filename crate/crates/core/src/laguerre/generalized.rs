use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{factorial_rat, int, rat_to_f64, ExactComplex, Scalar};

/// Generalized Laguerre function `M_a^m` with complex-rational degree
/// parameter `a`, integer order `m` and truncation `N`.
///
/// `M_a^m(x) = (1-a)_m sum_s a_s x^s / ((m+s)! s!)`, where `a_s` is the
/// rising factorial. For `a = -k` this is exactly `L_k^m`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneralizedLaguerreSpec {
    a: ExactComplex,
    order: usize,
    truncation: usize,
    polynomial: bool,
}

/// Residuals of the two recursions at one point, with the combined tail bound.
#[derive(Clone, Debug, Serialize)]
pub struct RecursionResiduals {
    pub x: f64,
    pub derivative: f64,
    pub sum: f64,
    /// The sum identity with the opposite shift `a - 1`, for comparison.
    pub sum_shift_down: f64,
    pub bound: f64,
}

pub fn in_c_sharp(a: &ExactComplex) -> bool {
    let re_ok = a.re < BigRational::one();
    let nonpositive_integer = a.im.is_zero() && a.re.is_integer() && !a.re.is_positive();
    re_ok && !nonpositive_integer
}

impl GeneralizedLaguerreSpec {
    pub fn new(a: ExactComplex, order: usize, truncation: usize) -> Result<Self> {
        if !in_c_sharp(&a) {
            return Err(Error::InadmissibleParameter(format!("{} + {}i", a.re, a.im)));
        }
        if truncation == 0 {
            return Err(Error::invalid("truncation must be positive"));
        }
        Ok(GeneralizedLaguerreSpec { a, order, truncation, polynomial: false })
    }

    /// The polynomial case `a = -k`, which lies outside the admissible set.
    pub fn polynomial(k: usize, order: usize, truncation: usize) -> Self {
        GeneralizedLaguerreSpec {
            a: ExactComplex::from_rational(&-int(k as i64)),
            order,
            truncation: truncation.max(k),
            polynomial: true,
        }
    }

    /// Same family member with shifted degree and order. The series is
    /// entire for every `a`, so shifts may leave the admissible set.
    pub fn shifted(&self, da: i64, dorder: usize) -> Result<Self> {
        let a = self.a.clone() + ExactComplex::from_rational(&int(da));
        if self.polynomial {
            let k = -(a.re.clone());
            if !k.is_integer() || k.is_negative() {
                return Err(Error::invalid("shift leaves the polynomial family"));
            }
            let k = k.to_integer().try_into().unwrap_or(0usize);
            return Ok(Self::polynomial(k, self.order + dorder, self.truncation));
        }
        Ok(GeneralizedLaguerreSpec { a, order: self.order + dorder, truncation: self.truncation, polynomial: false })
    }

    pub fn a(&self) -> &ExactComplex {
        &self.a
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn is_polynomial(&self) -> bool {
        self.polynomial
    }

    pub fn with_truncation(&self, truncation: usize) -> Self {
        let mut s = self.clone();
        s.truncation = truncation;
        s
    }

    /// `(1 - a)_m`
    pub fn prefactor(&self) -> ExactComplex {
        let mut acc = ExactComplex::one();
        for i in 1..=self.order {
            acc = acc * (ExactComplex::from_rational(&int(i as i64)) - self.a.clone());
        }
        acc
    }

    /// Rising factorials `a_0 .. a_N`.
    pub fn pochhammer(&self) -> Vec<ExactComplex> {
        let mut out = Vec::with_capacity(self.truncation + 1);
        let mut acc = ExactComplex::one();
        for s in 0..=self.truncation {
            out.push(acc.clone());
            acc = acc * (self.a.clone() + ExactComplex::from_rational(&int(s as i64)));
        }
        out
    }

    /// Exact series coefficients of `x^0 .. x^N`.
    pub fn coefficients(&self) -> Vec<ExactComplex> {
        let pre = self.prefactor();
        self.pochhammer()
            .into_iter()
            .enumerate()
            .map(|(s, p)| {
                let d = factorial_rat((self.order + s) as u64) * factorial_rat(s as u64);
                pre.clone() * p * ExactComplex::from_rational(&(BigRational::one() / d))
            })
            .collect()
    }

    fn a_c64(&self) -> Complex64 {
        self.a.to_c64()
    }

    /// Partial sum over `s = 0..=N` and a rigorous bound on the remainder.
    pub fn eval(&self, x: f64) -> Result<(Complex64, f64)> {
        if !(x >= 0.0) || !x.is_finite() {
            return Err(Error::invalid(format!("evaluation point {x} must be finite and nonnegative")));
        }
        let a = self.a_c64();
        let m = self.order as f64;
        let n = self.truncation;
        let mut term = self.prefactor().to_c64() / crate::exact::factorial_f64(self.order as u64);
        let mut sum = Complex64::new(0.0, 0.0);
        for s in 0..=n {
            sum += term;
            let sf = s as f64;
            term = term * (a + sf) * x / ((m + sf + 1.0) * (sf + 1.0));
        }
        if self.polynomial || x == 0.0 {
            return Ok((sum, 0.0));
        }
        // `term` is now term_{N+1}; ratios for s >= N+1 are bounded by rho.
        let nf = n as f64 + 1.0;
        let rho = ((a.norm() + nf) / (nf + 1.0)).max(1.0) * x / (m + nf + 1.0);
        if rho >= 1.0 {
            return Err(Error::InsufficientTruncation { x, terms: n, ratio: rho });
        }
        Ok((sum, term.norm() / (1.0 - rho)))
    }

    /// Derivative of the series, partial sum over `s = 1..=N` with its
    /// remainder bound.
    pub fn eval_derivative(&self, x: f64) -> Result<(Complex64, f64)> {
        let a = self.a_c64();
        let m = self.order as f64;
        let n = self.truncation;
        let coeffs = self.float_coefficients(n + 2);
        let mut sum = Complex64::new(0.0, 0.0);
        for (s, c) in coeffs.iter().enumerate().take(n + 1).skip(1) {
            sum += c * s as f64 * x.powi(s as i32 - 1);
        }
        if self.polynomial || x == 0.0 {
            return Ok((sum, 0.0));
        }
        let first = coeffs[n + 1] * (n as f64 + 1.0) * x.powi(n as i32);
        let nf = n as f64 + 1.0;
        let rho = ((a.norm() + nf) / nf).max(1.0) * x / (m + nf + 1.0);
        if rho >= 1.0 {
            return Err(Error::InsufficientTruncation { x, terms: n, ratio: rho });
        }
        Ok((sum, first.norm() / (1.0 - rho)))
    }

    fn float_coefficients(&self, len: usize) -> Vec<Complex64> {
        let a = self.a_c64();
        let m = self.order as f64;
        let mut c = self.prefactor().to_c64() / crate::exact::factorial_f64(self.order as u64);
        let mut out = Vec::with_capacity(len);
        for s in 0..len {
            out.push(c);
            let sf = s as f64;
            c = c * (a + sf) / ((m + sf + 1.0) * (sf + 1.0));
        }
        out
    }

    /// Second route: `e^x sum_i (-1)^i (1-a)_{m+i} / (m+i)! x^i / i!`,
    /// summed to `terms`. Alternating, so only usable for moderate `x`.
    pub fn eval_kummer(&self, x: f64, terms: usize) -> Complex64 {
        let a = self.a_c64();
        let m = self.order;
        // (1-a)_m / m!
        let mut c = self.prefactor().to_c64() / crate::exact::factorial_f64(m as u64);
        let mut sum = Complex64::new(0.0, 0.0);
        for i in 0..terms {
            sum += c;
            let fi = i as f64;
            // ratio: -(1 - a + m + i) x / ((m + i + 1)(i + 1))
            c = -c * (Complex64::new(1.0 + m as f64 + fi, 0.0) - a) * x / ((m as f64 + fi + 1.0) * (fi + 1.0));
        }
        sum * x.exp()
    }

    /// Exact check of both recursions on the formal coefficients up to
    /// index `N - 1`; returns the number of mismatching coefficients.
    pub fn formal_recursion_mismatches(&self) -> Result<(usize, usize)> {
        let up = self.shifted(1, 1)?;
        let same_up = self.shifted(0, 1)?;
        let c = self.coefficients();
        let cu = up.coefficients();
        let cs = same_up.coefficients();
        let n = self.truncation;
        let mut deriv = 0;
        let mut sum = 0;
        for s in 0..n {
            let d = c[s + 1].clone() * ExactComplex::from_rational(&int(s as i64 + 1)) + cu[s].clone();
            if !d.is_zero() {
                deriv += 1;
            }
            let t = cu[s].clone() + c[s].clone() - cs[s].clone();
            if !t.is_zero() {
                sum += 1;
            }
        }
        Ok((deriv, sum))
    }

    /// Numeric residuals of both recursions at `x`.
    pub fn recursion_residuals(&self, x: f64) -> Result<RecursionResiduals> {
        let up = self.shifted(1, 1)?;
        let same_up = self.shifted(0, 1)?;
        let (d, bd) = self.eval_derivative(x)?;
        let (mu, bu) = up.eval(x)?;
        let (m0, b0) = self.eval(x)?;
        let (ms, bs) = same_up.eval(x)?;
        let down = self.shifted(-1, 1).ok();
        let sum_shift_down = match down {
            Some(dn) => {
                let (md, _) = dn.eval(x)?;
                (md + m0 - ms).norm()
            }
            None => f64::NAN,
        };
        let scale = 1.0 + m0.norm() + mu.norm() + ms.norm();
        Ok(RecursionResiduals {
            x,
            derivative: (d + mu).norm(),
            sum: (mu + m0 - ms).norm(),
            sum_shift_down,
            bound: bd + bu + b0 + bs + 64.0 * f64::EPSILON * scale,
        })
    }

    pub fn real_part_f64(&self) -> f64 {
        rat_to_f64(&self.a.re)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{cx, rat};
    use crate::laguerre::laguerre_eval;

    #[test]
    fn admissible_set() {
        assert!(GeneralizedLaguerreSpec::new(cx(rat(1, 2), int(0)), 1, 10).is_ok());
        assert!(GeneralizedLaguerreSpec::new(cx(int(-2), int(0)), 1, 10).is_err());
        assert!(GeneralizedLaguerreSpec::new(cx(int(0), int(0)), 1, 10).is_err());
        assert!(GeneralizedLaguerreSpec::new(cx(int(1), int(0)), 1, 10).is_err());
        assert!(GeneralizedLaguerreSpec::new(cx(int(-2), int(1)), 1, 10).is_ok());
    }

    #[test]
    fn polynomial_case_is_laguerre() {
        let m = GeneralizedLaguerreSpec::polynomial(2, 0, 5);
        assert_eq!(m.eval(0.0).unwrap().0, Complex64::new(1.0, 0.0));
        for k in 0..6 {
            for order in 0..4 {
                let m = GeneralizedLaguerreSpec::polynomial(k, order, 10);
                for x in [0.3, 2.0, 7.5] {
                    let (v, b) = m.eval(x).unwrap();
                    assert_eq!(b, 0.0);
                    let want = laguerre_eval(k, order as f64, x);
                    assert!((v.re - want).abs() < 1e-10 * (1.0 + want.abs()));
                }
            }
        }
    }

    #[test]
    fn pochhammer_recurrence() {
        let m = GeneralizedLaguerreSpec::new(cx(rat(1, 3), rat(1, 5)), 2, 12).unwrap();
        let p = m.pochhammer();
        assert!(p[0].is_one());
        for s in 0..12 {
            assert_eq!(p[s + 1], p[s].clone() * (m.a().clone() + ExactComplex::from_rational(&int(s as i64))));
        }
    }

    #[test]
    fn value_at_origin() {
        // (1-a)_m / m! for a = 1/2, m = 2: (1/2)(3/2)/2 = 3/8
        let m = GeneralizedLaguerreSpec::new(cx(rat(1, 2), int(0)), 2, 10).unwrap();
        assert!((m.eval(0.0).unwrap().0.re - 0.375).abs() < 1e-15);
    }

    #[test]
    fn two_routes_agree() {
        let m = GeneralizedLaguerreSpec::new(cx(rat(1, 3), rat(-1, 4)), 1, 60).unwrap();
        for x in [0.0, 0.5, 1.0, 3.0] {
            let (v, b) = m.eval(x).unwrap();
            let k = m.eval_kummer(x, 80);
            assert!((v - k).norm() < 1e-10 + b, "x={x}: {v} vs {k}");
        }
    }

    #[test]
    fn truncation_error_reported() {
        let m = GeneralizedLaguerreSpec::new(cx(rat(1, 3), int(0)), 1, 4).unwrap();
        assert!(matches!(m.eval(50.0), Err(Error::InsufficientTruncation { .. })));
    }

    #[test]
    fn recursions_hold() {
        let m = GeneralizedLaguerreSpec::new(cx(rat(1, 3), int(0)), 2, 40).unwrap();
        assert_eq!(m.formal_recursion_mismatches().unwrap(), (0, 0));
        let r = m.recursion_residuals(1.0).unwrap();
        assert!(r.derivative <= r.bound && r.sum <= r.bound, "{r:?}");
        assert!(r.sum_shift_down > 1.0);
    }
}
