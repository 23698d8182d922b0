//! Coefficient rings used by the polynomial machinery.
//!
//! Exact work happens over `BigRational` (real symbols) or over
//! [`ExactComplex`] (Gaussian-rational symbols); numerics reuse the same
//! polynomial code over `Complex64`.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type ExactComplex = Complex<BigRational>;

/// Ring of polynomial coefficients.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Send
    + Sync
    + 'static
{
    fn from_rational(r: &BigRational) -> Self;
    fn conj(&self) -> Self;
    fn to_c64(&self) -> Complex64;
    /// Squared modulus as a float.
    fn norm_sqr_f64(&self) -> f64 {
        self.to_c64().norm_sqr()
    }
    /// Exact rings test for zero; floating rings compare against `tol`.
    fn is_negligible(&self, tol: f64) -> bool;
    /// Whether the ring carries rounding error.
    const EXACT: bool;
}

impl Scalar for BigRational {
    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }
    fn conj(&self) -> Self {
        self.clone()
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(rat_to_f64(self), 0.0)
    }
    fn is_negligible(&self, _tol: f64) -> bool {
        self.is_zero()
    }
    const EXACT: bool = true;
}

impl Scalar for ExactComplex {
    fn from_rational(r: &BigRational) -> Self {
        Complex::new(r.clone(), BigRational::zero())
    }
    fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -self.im.clone())
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }
    fn is_negligible(&self, _tol: f64) -> bool {
        self.is_zero()
    }
    const EXACT: bool = true;
}

impl Scalar for Complex64 {
    fn from_rational(r: &BigRational) -> Self {
        Complex64::new(rat_to_f64(r), 0.0)
    }
    fn conj(&self) -> Self {
        Complex::conj(self)
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
    fn is_negligible(&self, tol: f64) -> bool {
        self.norm() <= tol
    }
    const EXACT: bool = false;
}

pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

pub fn cx(re: BigRational, im: BigRational) -> ExactComplex {
    Complex::new(re, im)
}

pub fn rat_to_f64(r: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    // Large operands: shift both down before converting.
    let bits = r.numer().bits().max(r.denom().bits()) as i64;
    let shift = (bits - 900).max(0) as usize;
    let n = (r.numer() >> shift).to_f64().unwrap_or(0.0);
    let d = (r.denom() >> shift).to_f64().unwrap_or(1.0);
    if d == 0.0 {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    } else {
        n / d
    }
}

pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * BigUint::from(i))
}

pub fn factorial_rat(n: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(factorial(n)))
}

/// `ln(n!)`, accurate for all `n` used here.
pub fn ln_factorial(n: u64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    if n < 256 {
        return (2..=n).map(|i| (i as f64).ln()).sum();
    }
    // Stirling series
    let x = n as f64 + 1.0;
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + 1.0 / (12.0 * x)
        - 1.0 / (360.0 * x.powi(3))
}

pub fn factorial_f64(n: u64) -> f64 {
    ln_factorial(n).exp()
}

/// Binomial coefficient `binom(alpha + top_shift, m)` for rational `alpha`
/// via the product formula, no Gamma evaluation.
pub fn rational_binomial(upper: &BigRational, m: usize) -> BigRational {
    let mut acc = BigRational::one();
    for i in 0..m {
        acc = acc * (upper - int(i as i64)) / int(i as i64 + 1);
    }
    acc
}

/// Area of the unit sphere `S^{2n-1}` in `C^n`: `2 pi^n / (n-1)!`.
pub fn sphere_area(n: usize) -> f64 {
    2.0 * std::f64::consts::PI.powi(n as i32) / factorial_f64(n as u64 - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_product_form_matches_integers() {
        assert_eq!(rational_binomial(&int(5), 2), int(10));
        assert_eq!(rational_binomial(&int(7), 0), int(1));
        // binom(1/2, 2) = (1/2)(-1/2)/2 = -1/8
        assert_eq!(rational_binomial(&rat(1, 2), 2), rat(-1, 8));
    }

    #[test]
    fn float_conversion_survives_huge_operands() {
        let big = BigRational::new(BigInt::from(3) * BigInt::from(10).pow(400), BigInt::from(10).pow(400));
        assert!((rat_to_f64(&big) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(1) - 2.0 * std::f64::consts::PI).abs() < 1e-14);
        assert!((sphere_area(2) - 2.0 * std::f64::consts::PI.powi(2)).abs() < 1e-12);
    }
}
