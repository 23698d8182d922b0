use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use serde_json::json;

use super::{apply_w, apply_w_plus, phi_gaussian, radial_powers, series_in_t, GaussianPolynomial, OperatorTable, Ordering};
use crate::error::{Error, Result};
use crate::exact::{int, rat_to_f64, ExactComplex, Scalar};
use crate::harmonics::BigradedPolynomial;
use crate::laguerre::GeneralizedLaguerreSpec;
use crate::poly::{Monomial, Poly};

/// Which reading of the ladder identity to check.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LadderConvention {
    /// `lambda = 1` lowers the degree by `p`, `lambda = -1` by `q`, factor
    /// `(-2)^{-p-q}`; generalized degree `a` moves to `a + p`.
    #[default]
    Consistent,
    /// The branch labels and factor `(-2 lambda)^{-p-q}` as printed
    /// (`lambda < 0` drops `p`, `lambda > 0` drops `q`); generalized degree
    /// `a` moves to `a - p`.
    Printed,
}

/// One identity check with its residual.
#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub identity: String,
    pub parameters: serde_json::Value,
    pub residual_terms: Vec<String>,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl VerificationReport {
    fn from_residual<S: Scalar + std::fmt::Display>(identity: &str, parameters: serde_json::Value, residual: &Poly<S>) -> Self {
        let residual_terms: Vec<String> = residual.terms().map(|(m, c)| format!("({c})*{m}")).collect();
        let status = if residual_terms.is_empty() { "pass" } else { "fail" };
        VerificationReport { identity: identity.into(), parameters, residual_terms, status: status.into(), note: None }
    }

    pub fn passed(&self) -> bool {
        self.status == "pass"
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

pub const MONOMIAL_LADDER: &str = "(W_1^+)^p W_2^q phi_k^{n-1} = (-2)^{-p-q} z_1^p zbar_2^q phi_{k-p}^{n+p+q-1} (k >= p, else 0)";
pub const HARMONIC_LADDER: &str = "P(W) phi_{k,lambda}^{n-1} = (-2)^{-p-q} P phi_{k-d,lambda}^{n+p+q-1}, d = p for lambda = 1, d = q for lambda = -1";
pub const HARMONIC_LADDER_PRINTED: &str = "P(W) phi_{k,lambda}^{n-1} = (-2 lambda)^{-p-q} P phi_{k-d,lambda}^{n+p+q-1}, d = p for lambda < 0, d = q for lambda > 0";
pub const GENERALIZED_LADDER: &str = "z_1^p zbar_2^q (W) phi_a^{n-1} = (-2)^{-p-q} z_1^p zbar_2^q phi_{a'}^{n+p+q-1} (formal series)";
pub const COMMUTATOR: &str = "[W_j^+, -W_j] = (lambda/2) I";
pub const EIGENFUNCTION: &str = "(-Laplacian + |z|^2/4) phi_k^{n-1} = (2k+n) phi_k^{n-1}";

fn neg_half_pow(e: usize) -> BigRational {
    let v = BigRational::new(BigInt::one(), BigInt::one() << e);
    if e % 2 == 1 {
        -v
    } else {
        v
    }
}

fn lambda_rat(lambda: i8) -> Result<BigRational> {
    match lambda {
        1 | -1 => Ok(int(lambda as i64)),
        _ => Err(Error::invalid("ladder identities are checked for lambda = +1 and -1")),
    }
}

/// Checks the ladder for `P_1 = z_1^p zbar_2^q` at `lambda = 1`.
pub fn verify_monomial_ladder(p: usize, q: usize, k: usize, n: usize) -> Result<VerificationReport> {
    if q > 0 && n < 2 {
        return Err(Error::invalid("zbar_2 needs n >= 2"));
    }
    if p > u8::MAX as usize || q > u8::MAX as usize {
        return Err(Error::invalid("degree too large"));
    }
    let one = int(1);
    let mut m = Monomial::ONE;
    m.alpha[0] = p as u8;
    if q > 0 {
        m.beta[1] = q as u8;
    }
    let symbol = Poly::<BigRational>::monomial(n, m, int(1));
    let f = phi_gaussian::<BigRational>(k, n - 1, n, &one)?;
    let lhs = OperatorTable::new(one.clone(), Ordering::Tau, f)?.apply(&symbol)?;
    let rhs = if k >= p {
        let g = phi_gaussian::<BigRational>(k - p, n + p + q - 1, n, &one)?;
        symbol.mul(g.poly()).scale(&neg_half_pow(p + q))
    } else {
        Poly::zero(n)
    };
    let residual = lhs.poly() - &rhs;
    Ok(VerificationReport::from_residual(MONOMIAL_LADDER, json!({ "p": p, "q": q, "k": k, "n": n }), &residual))
}

fn as_real(p: &Poly<ExactComplex>) -> Option<Poly<BigRational>> {
    if p.terms().all(|(_, c)| c.im.is_zero()) {
        let mut out = Poly::zero(p.dim());
        for (m, c) in p.terms() {
            out.add_term(*m, c.re.clone());
        }
        Some(out)
    } else {
        None
    }
}

fn ladder_target(p: usize, q: usize, k: usize, lambda: i8, convention: LadderConvention) -> (Option<usize>, BigRational) {
    let drop = match (convention, lambda > 0) {
        (LadderConvention::Consistent, true) | (LadderConvention::Printed, false) => p,
        _ => q,
    };
    let factor = match convention {
        LadderConvention::Consistent => neg_half_pow(p + q),
        LadderConvention::Printed => {
            // (-2 lambda)^{-p-q}
            let base = neg_half_pow(p + q);
            if lambda < 0 && (p + q) % 2 == 1 {
                -base
            } else {
                base
            }
        }
    };
    ((k >= drop).then(|| k - drop), factor)
}

fn harmonic_ladder_residual<S: Scalar>(
    table: &mut OperatorTable<S>,
    symbol: &Poly<S>,
    p: usize,
    q: usize,
    k: usize,
    lambda: i8,
    convention: LadderConvention,
) -> Result<Poly<S>> {
    let n = symbol.dim();
    let lam = lambda_rat(lambda)?;
    let lhs = table.apply(symbol)?;
    let (target, factor) = ladder_target(p, q, k, lambda, convention);
    let rhs = match target {
        Some(j) => {
            let g = phi_gaussian::<S>(j, n + p + q - 1, n, &lam)?;
            symbol.mul(g.poly()).scale(&S::from_rational(&factor))
        }
        None => Poly::zero(n),
    };
    Ok(lhs.poly() - &rhs)
}

fn harmonic_params(p: &BigradedPolynomial, k: usize, lambda: i8, convention: LadderConvention) -> serde_json::Value {
    json!({
        "n": p.n(), "p": p.p(), "q": p.q(), "k": k, "lambda": lambda,
        "convention": convention, "symbol": p.poly().to_string_exact(),
    })
}

/// Checks `P(W) phi_k = c P phi_{k-d}` for a harmonic `P` at `lambda = +-1`.
pub fn verify_harmonic_ladder(
    p: &BigradedPolynomial,
    k: usize,
    lambda: i8,
    convention: LadderConvention,
) -> Result<VerificationReport> {
    Ok(verify_harmonic_batch(std::slice::from_ref(p), k, lambda, convention)?.remove(0))
}

/// Runs the harmonic ladder over several symbols of the same bidegree,
/// sharing the operator images of `phi_k`.
pub fn verify_harmonic_batch(
    symbols: &[BigradedPolynomial],
    k: usize,
    lambda: i8,
    convention: LadderConvention,
) -> Result<Vec<VerificationReport>> {
    let Some(first) = symbols.first() else { return Ok(Vec::new()) };
    let (n, p, q) = (first.n(), first.p(), first.q());
    for s in symbols {
        if !s.is_harmonic() {
            return Err(Error::NotHarmonic(s.laplacian().poly().len()));
        }
        if (s.n(), s.p(), s.q()) != (n, p, q) {
            return Err(Error::invalid("batch symbols must share (n, p, q)"));
        }
    }
    let lam = lambda_rat(lambda)?;
    let anchor = match convention {
        LadderConvention::Consistent => HARMONIC_LADDER,
        LadderConvention::Printed => HARMONIC_LADDER_PRINTED,
    };
    let reals: Option<Vec<Poly<BigRational>>> = symbols.iter().map(|s| as_real(s.poly())).collect();
    let mut out = Vec::with_capacity(symbols.len());
    match reals {
        Some(reals) => {
            let f = phi_gaussian::<BigRational>(k, n - 1, n, &lam)?;
            let mut table = OperatorTable::new(lam, Ordering::Tau, f)?;
            for (s, r) in symbols.iter().zip(&reals) {
                let res = harmonic_ladder_residual(&mut table, r, p, q, k, lambda, convention)?;
                out.push(VerificationReport::from_residual(anchor, harmonic_params(s, k, lambda, convention), &res));
            }
        }
        None => {
            let f = phi_gaussian::<ExactComplex>(k, n - 1, n, &lam)?;
            let mut table = OperatorTable::new(lam, Ordering::Tau, f)?;
            for s in symbols {
                let res = harmonic_ladder_residual(&mut table, s.poly(), p, q, k, lambda, convention)?;
                out.push(VerificationReport::from_residual(anchor, harmonic_params(s, k, lambda, convention), &res));
            }
        }
    }
    Ok(out)
}

/// `tau'(P) f - tau(P) f`.
pub fn tau_difference<S: Scalar>(symbol: &Poly<S>, lambda: &BigRational, f: &GaussianPolynomial<S>) -> Result<GaussianPolynomial<S>> {
    let a = OperatorTable::new(lambda.clone(), Ordering::TauPrime, f.clone())?.apply(symbol)?;
    let b = OperatorTable::new(lambda.clone(), Ordering::Tau, f.clone())?.apply(symbol)?;
    a.sub(&b)
}

/// `(W_j^+ (-W_j) - (-W_j) W_j^+) f - (lambda/2) f`; identically zero.
pub fn commutator_check<S: Scalar>(j: usize, lambda: &BigRational, f: &GaussianPolynomial<S>) -> Result<GaussianPolynomial<S>> {
    let wpw = apply_w_plus(j, lambda, &apply_w(j, lambda, f)?)?;
    let wwp = apply_w(j, lambda, &apply_w_plus(j, lambda, f)?)?;
    // -W^+ W + W W^+
    let comm = wwp.sub(&wpw)?;
    comm.sub(&f.scaled(&S::from_rational(&(lambda.clone() / int(2)))))
}

/// `(A - (2k + n + shift)) phi_k^{n-1}` with `A` the special Hermite operator.
pub fn special_hermite_eigencheck(k: usize, n: usize, shift: i64) -> Result<GaussianPolynomial<BigRational>> {
    let f = phi_gaussian::<BigRational>(k, n - 1, n, &int(1))?;
    let ev = int((2 * k + n) as i64 + shift);
    f.special_hermite().sub(&f.scaled(&ev))
}

/// [`commutator_check`] as a report.
pub fn commutator_report<S: Scalar + std::fmt::Display>(j: usize, lambda: &BigRational, f: &GaussianPolynomial<S>) -> Result<VerificationReport> {
    let res = commutator_check(j, lambda, f)?;
    let params = json!({ "j": j, "lambda": lambda.to_string(), "n": f.n(), "terms": f.poly().len() });
    Ok(VerificationReport::from_residual(COMMUTATOR, params, res.poly()))
}

/// [`special_hermite_eigencheck`] as a report.
pub fn eigenfunction_report(k: usize, n: usize) -> Result<VerificationReport> {
    let res = special_hermite_eigencheck(k, n, 0)?;
    Ok(VerificationReport::from_residual(EIGENFUNCTION, json!({ "k": k, "n": n }), res.poly()))
}

/// Formal-series check of the ladder on generalized Laguerre functions at
/// `lambda = 1` for `P_1 = z_1^p zbar_2^q`.
///
/// The truncated series of `phi_a^{n-1}` (in `t = |z|^2/2`, up to `t^N`) is
/// pushed through the operators; monomials of total degree at most
/// `2N + 1 - (p + q)` are unaffected by the truncation and must match.
pub fn verify_generalized_ladder(
    spec: &GeneralizedLaguerreSpec,
    p: usize,
    q: usize,
    n: usize,
    convention: LadderConvention,
) -> Result<VerificationReport> {
    let big_n = spec.truncation();
    if big_n < p + q + 4 {
        return Err(Error::invalid(format!("truncation {big_n} must be at least p + q + 4 = {}", p + q + 4)));
    }
    if spec.order() + 1 != n {
        return Err(Error::invalid(format!("series order {} does not match n - 1 = {}", spec.order(), n - 1)));
    }
    if q > 0 && n < 2 {
        return Err(Error::invalid("zbar_2 needs n >= 2"));
    }
    let one = int(1);
    let mut m = Monomial::ONE;
    m.alpha[0] = p as u8;
    if q > 0 {
        m.beta[1] = q as u8;
    }
    let symbol = Poly::<ExactComplex>::monomial(n, m, ExactComplex::one());
    let powers = radial_powers::<ExactComplex>(n, big_n);
    let f = GaussianPolynomial::new(one.clone(), series_in_t(n, &spec.coefficients(), &one, &powers))?;
    let lhs = OperatorTable::new(one.clone(), Ordering::Tau, f)?.apply(&symbol)?;
    let shift = match convention {
        LadderConvention::Consistent => p as i64,
        LadderConvention::Printed => -(p as i64),
    };
    let target = spec.shifted(shift, p + q);
    let rhs = match target {
        Ok(t) => symbol
            .mul(&series_in_t(n, &t.coefficients(), &one, &powers))
            .scale(&ExactComplex::from_rational(&neg_half_pow(p + q))),
        // Polynomial family with k < p: the right side vanishes.
        Err(_) if spec.is_polynomial() => Poly::zero(n),
        Err(e) => return Err(e),
    };
    let safe = 2 * big_n + 1 - (p + q);
    let residual = (lhs.poly() - &rhs).restrict_degree(safe);
    let max_abs = residual.terms().map(|(_, c)| c.to_c64().norm()).fold(0.0, f64::max);
    let params = json!({
        "a": format!("{} + {}i", spec.a().re, spec.a().im),
        "polynomial": spec.is_polynomial(),
        "p": p, "q": q, "n": n, "truncation": big_n,
        "checked_degree": safe, "convention": convention,
        "max_residual": max_abs,
    });
    let _ = rat_to_f64;
    Ok(VerificationReport::from_residual(GENERALIZED_LADDER, params, &residual)
        .with_note(format!("monomials of total degree <= {safe} compared")))
}

trait ExactString {
    fn to_string_exact(&self) -> String;
}

impl ExactString for Poly<ExactComplex> {
    fn to_string_exact(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.terms()
            .map(|(m, c)| {
                if c.im.is_zero() {
                    format!("({})*{m}", c.re)
                } else {
                    format!("({}+{}i)*{m}", c.re, c.im)
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{cx, rat};
    use crate::harmonics::harmonic_basis;

    #[test]
    fn monomial_ladder_examples() {
        assert!(verify_monomial_ladder(0, 0, 3, 1).unwrap().passed());
        assert!(verify_monomial_ladder(1, 1, 1, 2).unwrap().passed());
        assert!(verify_monomial_ladder(2, 0, 1, 1).unwrap().passed());
        for p in 0..=3 {
            for q in 0..=3 {
                for k in 0..=4 {
                    assert!(verify_monomial_ladder(p, q, k, 2).unwrap().passed(), "p={p} q={q} k={k}");
                }
            }
        }
    }

    #[test]
    fn harmonic_ladder_examples() {
        let z1 = BigradedPolynomial::monomial(1, Monomial::z(0), ExactComplex::one());
        assert!(verify_harmonic_ladder(&z1, 1, 1, LadderConvention::Consistent).unwrap().passed());
        let zb = BigradedPolynomial::monomial(1, Monomial::zbar(0), ExactComplex::one());
        let r = verify_harmonic_ladder(&zb, 0, -1, LadderConvention::Consistent).unwrap();
        assert!(r.passed());
        let b = harmonic_basis(2, 1, 1);
        for r in verify_harmonic_batch(&b.elements, 2, 1, LadderConvention::Consistent).unwrap() {
            assert!(r.passed(), "{r:?}");
        }
        // the printed branch labels do not hold
        let r = verify_harmonic_ladder(&z1, 1, 1, LadderConvention::Printed).unwrap();
        assert!(!r.passed());
    }

    #[test]
    fn non_harmonic_rejected() {
        let p = BigradedPolynomial::monomial(1, Monomial::z(0).mul(&Monomial::zbar(0)), ExactComplex::one());
        assert!(matches!(verify_harmonic_ladder(&p, 1, 1, LadderConvention::Consistent), Err(Error::NotHarmonic(_))));
    }

    #[test]
    fn tau_orderings() {
        let one = int(1);
        let f = phi_gaussian::<BigRational>(2, 1, 2, &one).unwrap();
        for e in harmonic_basis(2, 1, 1).elements {
            let s = as_real(e.poly()).unwrap();
            assert!(tau_difference(&s, &one, &f).unwrap().is_zero());
        }
        for lam in [int(1), int(-1), rat(1, 3)] {
            let g = GaussianPolynomial::monomial(1, &lam, Monomial::ONE, int(1)).unwrap();
            let zz = Poly::monomial(1, Monomial::z(0).mul(&Monomial::zbar(0)), int(1));
            let d = tau_difference(&zz, &lam, &g).unwrap();
            assert_eq!(d, g.scaled(&(lam.clone() / int(2))));
        }
    }

    #[test]
    fn commutator_examples() {
        let one = int(1);
        let g = GaussianPolynomial::monomial(1, &one, Monomial::ONE, int(1)).unwrap();
        assert!(commutator_check(0, &one, &g).unwrap().is_zero());
        let m = Monomial::new([2, 0, 0, 0], [0, 1, 0, 0]);
        let g = GaussianPolynomial::monomial(2, &one, m, int(1)).unwrap();
        assert!(commutator_check(0, &one, &g).unwrap().is_zero());
        assert!(commutator_check(1, &one, &g).unwrap().is_zero());
        let lam = rat(-3, 2);
        let g = GaussianPolynomial::monomial(2, &lam, m, cx(int(2), rat(1, 5))).unwrap();
        assert!(commutator_check(1, &lam, &g).unwrap().is_zero());
    }

    #[test]
    fn eigen_examples() {
        assert!(special_hermite_eigencheck(0, 1, 0).unwrap().is_zero());
        assert!(special_hermite_eigencheck(3, 2, 0).unwrap().is_zero());
        assert!(!special_hermite_eigencheck(3, 2, 1).unwrap().is_zero());
    }

    #[test]
    fn generalized_examples() {
        let poly = GeneralizedLaguerreSpec::polynomial(3, 1, 10);
        assert!(verify_generalized_ladder(&poly, 1, 1, 2, LadderConvention::Consistent).unwrap().passed());
        let poly = GeneralizedLaguerreSpec::polynomial(1, 1, 10);
        assert!(verify_generalized_ladder(&poly, 2, 0, 2, LadderConvention::Consistent).unwrap().passed());
        let half = GeneralizedLaguerreSpec::new(cx(rat(1, 2), int(0)), 0, 20).unwrap();
        assert!(verify_generalized_ladder(&half, 1, 0, 1, LadderConvention::Consistent).unwrap().passed());
        let third = GeneralizedLaguerreSpec::new(cx(rat(1, 3), int(0)), 1, 24).unwrap();
        assert!(verify_generalized_ladder(&third, 1, 1, 2, LadderConvention::Consistent).unwrap().passed());
        assert!(!verify_generalized_ladder(&third, 1, 1, 2, LadderConvention::Printed).unwrap().passed());
        let short = GeneralizedLaguerreSpec::new(cx(rat(1, 3), int(0)), 1, 5).unwrap();
        assert!(verify_generalized_ladder(&short, 1, 1, 2, LadderConvention::Consistent).is_err());
    }
}
