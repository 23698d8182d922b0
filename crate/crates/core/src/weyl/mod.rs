//! Exact Gaussian polynomials `poly(z, zbar) e^{-|lambda||z|^2/4}` and the
//! operators `W_j = d/dz_j - (lambda/4) zbar_j`, `W_j^+ = d/dzbar_j + (lambda/4) z_j`.

mod ladders;

pub use ladders::{
    commutator_check, commutator_report, eigenfunction_report, special_hermite_eigencheck, tau_difference,
    verify_generalized_ladder, verify_harmonic_batch, verify_harmonic_ladder, verify_monomial_ladder, LadderConvention,
    VerificationReport, COMMUTATOR, EIGENFUNCTION, GENERALIZED_LADDER, HARMONIC_LADDER, HARMONIC_LADDER_PRINTED,
    MONOMIAL_LADDER,
};

use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{int, rat, Scalar};
use crate::laguerre::laguerre_coeffs_int;
use crate::poly::{Monomial, Poly};

/// `poly(z, zbar) * e^{-s |z|^2 / 4}` with `s = |lambda| > 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianPolynomial<S> {
    scale: BigRational,
    poly: Poly<S>,
}

impl<S: Scalar> GaussianPolynomial<S> {
    pub fn new(scale: BigRational, poly: Poly<S>) -> Result<Self> {
        if !scale.is_positive() {
            return Err(Error::invalid("Gaussian scale must be positive"));
        }
        Ok(GaussianPolynomial { scale, poly })
    }

    /// `e^{-|lambda||z|^2/4}` times a monomial.
    pub fn monomial(n: usize, lambda: &BigRational, m: Monomial, c: S) -> Result<Self> {
        Self::new(lambda.abs(), Poly::monomial(n, m, c))
    }

    pub fn scale(&self) -> &BigRational {
        &self.scale
    }

    pub fn poly(&self) -> &Poly<S> {
        &self.poly
    }

    pub fn n(&self) -> usize {
        self.poly.dim()
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    fn with_poly(&self, poly: Poly<S>) -> Self {
        GaussianPolynomial { scale: self.scale.clone(), poly }
    }

    fn check_scale(&self, lambda: &BigRational) -> Result<()> {
        if lambda.is_zero() {
            return Err(Error::invalid("lambda must be nonzero"));
        }
        if lambda.abs() != self.scale {
            return Err(Error::ScaleMismatch { operator: lambda.abs().to_string(), function: self.scale.to_string() });
        }
        Ok(())
    }

    fn check_index(&self, j: usize) -> Result<()> {
        if j >= self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), got: j + 1 });
        }
        Ok(())
    }

    /// `d/dz_j`, chain rule on the Gaussian included.
    pub fn d_z(&self, j: usize) -> GaussianPolynomial<S> {
        let s4 = S::from_rational(&(self.scale.clone() / int(4)));
        let mut p = self.poly.d_z(j);
        p.add_scaled(&self.poly.mul_zbar(j), &(-s4));
        self.with_poly(p)
    }

    /// `d/dzbar_j`, chain rule on the Gaussian included.
    pub fn d_zbar(&self, j: usize) -> GaussianPolynomial<S> {
        let s4 = S::from_rational(&(self.scale.clone() / int(4)));
        let mut p = self.poly.d_zbar(j);
        p.add_scaled(&self.poly.mul_z(j), &(-s4));
        self.with_poly(p)
    }

    pub fn mul_z(&self, j: usize) -> GaussianPolynomial<S> {
        self.with_poly(self.poly.mul_z(j))
    }

    pub fn mul_zbar(&self, j: usize) -> GaussianPolynomial<S> {
        self.with_poly(self.poly.mul_zbar(j))
    }

    pub fn scaled(&self, c: &S) -> GaussianPolynomial<S> {
        self.with_poly(self.poly.scale(c))
    }

    pub fn add(&self, other: &GaussianPolynomial<S>) -> Result<GaussianPolynomial<S>> {
        if self.scale != other.scale {
            return Err(Error::ScaleMismatch { operator: self.scale.to_string(), function: other.scale.to_string() });
        }
        Ok(self.with_poly(&self.poly + &other.poly))
    }

    pub fn sub(&self, other: &GaussianPolynomial<S>) -> Result<GaussianPolynomial<S>> {
        if self.scale != other.scale {
            return Err(Error::ScaleMismatch { operator: self.scale.to_string(), function: other.scale.to_string() });
        }
        Ok(self.with_poly(&self.poly - &other.poly))
    }

    /// `-Laplacian + |z|^2/4` (special Hermite operator), defined for scale 1.
    pub fn special_hermite(&self) -> GaussianPolynomial<S> {
        let four = S::from_rational(&int(4));
        let quarter = S::from_rational(&rat(1, 4));
        let mut out = Poly::zero(self.n());
        for j in 0..self.n() {
            out.add_scaled(&self.d_zbar(j).d_z(j).poly, &(-four.clone()));
            out.add_scaled(&self.poly.mul_z(j).mul_zbar(j), &quarter);
        }
        self.with_poly(out)
    }

    pub fn eval(&self, z: &[num_complex::Complex64]) -> num_complex::Complex64 {
        let r2: f64 = z.iter().map(|c| c.norm_sqr()).sum();
        self.poly.eval(z) * (-crate::exact::rat_to_f64(&self.scale) * r2 / 4.0).exp()
    }
}

/// `(W_j f)`: poly maps to `d_z poly - ((s + lambda)/4) zbar_j poly`.
pub fn apply_w<S: Scalar>(j: usize, lambda: &BigRational, f: &GaussianPolynomial<S>) -> Result<GaussianPolynomial<S>> {
    f.check_scale(lambda)?;
    f.check_index(j)?;
    let c = S::from_rational(&((f.scale.clone() + lambda) / int(4)));
    let mut p = f.poly.d_z(j);
    p.add_scaled(&f.poly.mul_zbar(j), &(-c));
    Ok(f.with_poly(p))
}

/// `(W_j^+ f)`: poly maps to `d_zbar poly - ((s - lambda)/4) z_j poly`.
pub fn apply_w_plus<S: Scalar>(j: usize, lambda: &BigRational, f: &GaussianPolynomial<S>) -> Result<GaussianPolynomial<S>> {
    f.check_scale(lambda)?;
    f.check_index(j)?;
    let c = S::from_rational(&((f.scale.clone() - lambda) / int(4)));
    let mut p = f.poly.d_zbar(j);
    p.add_scaled(&f.poly.mul_z(j), &(-c));
    Ok(f.with_poly(p))
}

/// Operator ordering for a polynomial symbol: `z_j` becomes `W_j^+`,
/// `zbar_j` becomes `W_j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Ordering {
    /// All `W^+` factors to the left of all `W` factors.
    Tau,
    /// All `W` factors to the left.
    TauPrime,
}

/// Memoized images of a fixed Gaussian polynomial under ordered monomial
/// operators, shared across the symbols applied to it.
pub struct OperatorTable<S> {
    lambda: BigRational,
    ordering: Ordering,
    base: GaussianPolynomial<S>,
    cache: HashMap<Monomial, GaussianPolynomial<S>>,
}

impl<S: Scalar> OperatorTable<S> {
    pub fn new(lambda: BigRational, ordering: Ordering, base: GaussianPolynomial<S>) -> Result<Self> {
        base.check_scale(&lambda)?;
        Ok(OperatorTable { lambda, ordering, base, cache: HashMap::new() })
    }

    /// Image of the base function under the operator of `z^alpha zbar^beta`.
    pub fn image(&mut self, m: &Monomial) -> Result<GaussianPolynomial<S>> {
        if *m == Monomial::ONE {
            return Ok(self.base.clone());
        }
        if let Some(v) = self.cache.get(m) {
            return Ok(v.clone());
        }
        let has_alpha = m.alpha.iter().any(|&a| a > 0);
        let has_beta = m.beta.iter().any(|&b| b > 0);
        // Peel off the outermost (leftmost) operator.
        let peel_plus = match self.ordering {
            Ordering::Tau => has_alpha,
            Ordering::TauPrime => !has_beta,
        };
        let mut inner = *m;
        let out = if peel_plus {
            let j = m.alpha.iter().position(|&a| a > 0).expect("alpha nonzero");
            inner.alpha[j] -= 1;
            let g = self.image(&inner)?;
            apply_w_plus(j, &self.lambda, &g)?
        } else {
            let j = m.beta.iter().position(|&b| b > 0).expect("beta nonzero");
            inner.beta[j] -= 1;
            let g = self.image(&inner)?;
            apply_w(j, &self.lambda, &g)?
        };
        self.cache.insert(*m, out.clone());
        Ok(out)
    }

    /// Linear extension over the monomials of `symbol`.
    pub fn apply(&mut self, symbol: &Poly<S>) -> Result<GaussianPolynomial<S>> {
        if symbol.dim() != self.base.n() {
            return Err(Error::DimensionMismatch { expected: self.base.n(), got: symbol.dim() });
        }
        let mut out = Poly::zero(self.base.n());
        for (m, c) in symbol.terms() {
            let img = self.image(m)?;
            out.add_scaled(img.poly(), c);
        }
        Ok(self.base.with_poly(out))
    }
}

/// `tau(P) f`: `sum c_ab (W^+)^a W^b f`.
pub fn apply_tau<S: Scalar>(symbol: &Poly<S>, lambda: &BigRational, f: &GaussianPolynomial<S>) -> Result<GaussianPolynomial<S>> {
    OperatorTable::new(lambda.clone(), Ordering::Tau, f.clone())?.apply(symbol)
}

/// `tau'(P) f`: `sum c_ab W^b (W^+)^a f`.
pub fn apply_tau_prime<S: Scalar>(symbol: &Poly<S>, lambda: &BigRational, f: &GaussianPolynomial<S>) -> Result<GaussianPolynomial<S>> {
    OperatorTable::new(lambda.clone(), Ordering::TauPrime, f.clone())?.apply(symbol)
}

/// Powers `(z . zbar)^i` for `i = 0..=max` in `n` variables.
pub(crate) fn radial_powers<S: Scalar>(n: usize, max: usize) -> Vec<Poly<S>> {
    let mut r2 = Poly::zero(n);
    for j in 0..n {
        r2.add_term(Monomial::z(j).mul(&Monomial::zbar(j)), S::one());
    }
    let mut out = vec![Poly::constant(n, S::one())];
    for i in 1..=max {
        out.push(out[i - 1].mul(&r2));
    }
    out
}

/// `sum_i c_i (s |z|^2 / 2)^i` for coefficients `c_i` of a series in `t = |z|^2/2`.
pub(crate) fn series_in_t<S: Scalar>(n: usize, coeffs: &[S], s: &BigRational, powers: &[Poly<S>]) -> Poly<S> {
    let half_s = s.clone() / int(2);
    let mut out = Poly::zero(n);
    let mut w = BigRational::one();
    for (i, c) in coeffs.iter().enumerate() {
        out.add_scaled(&powers[i], &(c.clone() * S::from_rational(&w)));
        w *= &half_s;
    }
    out
}

/// `phi_k^{order}` on `C^n` at scale `|lambda|` as an exact Gaussian polynomial:
/// `L_k^order(|lambda| |z|^2 / 2) e^{-|lambda| |z|^2 / 4}`.
pub fn phi_gaussian<S: Scalar>(k: usize, order: usize, n: usize, lambda: &BigRational) -> Result<GaussianPolynomial<S>> {
    let coeffs: Vec<S> = laguerre_coeffs_int(k, order).iter().map(S::from_rational).collect();
    let powers = radial_powers::<S>(n, k);
    let s = lambda.abs();
    let poly = series_in_t(n, &coeffs, &s, &powers);
    GaussianPolynomial::new(s, poly)
}
