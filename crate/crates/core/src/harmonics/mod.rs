//! Bigraded polynomials on `C^n` and the solid harmonics `H_{p,q}`.

mod linalg;
mod sphere;

pub use linalg::{kernel_dimension, laplacian_matrix};
pub use sphere::{
    random_sphere_points, sph_coefficients, sph_coefficients_sampled, sup_norm_bound_check, SphereRule, SupNormCheck,
};

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{factorial, int, rat_to_f64, ExactComplex, Scalar};
use crate::poly::{bigraded_monomials, Monomial, Poly, MAX_DIM};

/// Homogeneous polynomial of bidegree `(p, q)` with Gaussian-rational
/// coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct BigradedPolynomial {
    p: usize,
    q: usize,
    poly: Poly<ExactComplex>,
}

impl BigradedPolynomial {
    pub fn new(p: usize, q: usize, poly: Poly<ExactComplex>) -> Result<Self> {
        for (m, _) in poly.terms() {
            if m.holomorphic_degree() != p || m.antiholomorphic_degree() != q {
                return Err(Error::invalid(format!("monomial {m} is not of bidegree ({p}, {q})")));
            }
        }
        Ok(BigradedPolynomial { p, q, poly })
    }

    pub fn zero(n: usize, p: usize, q: usize) -> Self {
        BigradedPolynomial { p, q, poly: Poly::zero(n) }
    }

    pub fn monomial(n: usize, m: Monomial, c: ExactComplex) -> Self {
        BigradedPolynomial { p: m.holomorphic_degree(), q: m.antiholomorphic_degree(), poly: Poly::monomial(n, m, c) }
    }

    pub fn from_real(p: usize, q: usize, poly: &Poly<BigRational>) -> Result<Self> {
        Self::new(p, q, poly.map(ExactComplex::from_rational))
    }

    pub fn n(&self) -> usize {
        self.poly.dim()
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn poly(&self) -> &Poly<ExactComplex> {
        &self.poly
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        self.poly.eval(z)
    }

    /// `4 sum_j d^2 P / dz_j dzbar_j`, of bidegree `(p-1, q-1)`.
    pub fn laplacian(&self) -> BigradedPolynomial {
        if self.p == 0 || self.q == 0 {
            return BigradedPolynomial::zero(self.n(), self.p.saturating_sub(1), self.q.saturating_sub(1));
        }
        BigradedPolynomial { p: self.p - 1, q: self.q - 1, poly: self.poly.laplacian() }
    }

    pub fn is_harmonic(&self) -> bool {
        self.laplacian().is_zero()
    }

    /// `sum |c_ab|^2 alpha! beta!`
    pub fn sphere_l2_norm(&self) -> BigRational {
        coefficient_inner(&self.poly, &self.poly).re
    }

    /// Squared norm under the normalized surface measure on the unit sphere,
    /// valid for harmonic `P`: `(n-1)! / (n-1+p+q)!` times the coefficient norm.
    pub fn normalized_sphere_norm_sq(&self) -> f64 {
        let n = self.n();
        let c = rat_to_f64(&self.sphere_l2_norm());
        c * ((n as u64)..(n + self.p + self.q) as u64).map(|i| 1.0 / i as f64).product::<f64>()
    }

    pub fn scale(&self, c: &ExactComplex) -> BigradedPolynomial {
        BigradedPolynomial { p: self.p, q: self.q, poly: self.poly.scale(c) }
    }

    pub fn to_c64(&self) -> Poly<Complex64> {
        self.poly.to_c64()
    }
}

/// `<P, Q> = sum c_ab conj(d_ab) alpha! beta!`
pub fn coefficient_inner(a: &Poly<ExactComplex>, b: &Poly<ExactComplex>) -> ExactComplex {
    let mut acc = ExactComplex::zero();
    for (m, c) in a.terms() {
        let d = b.coefficient(m);
        if d.is_zero() {
            continue;
        }
        let w = BigRational::from_integer(BigInt::from(m.factorial_weight()));
        acc = acc + c.clone() * d.conj() * ExactComplex::from_rational(&w);
    }
    acc
}

/// `dim H_{p,q}` on `C^n`:
/// `(p+q+n-1)(p+n-2)!(q+n-2)! / (p! q! (n-1)! (n-2)!)` for `n >= 2`;
/// on `C` it is 1 when `p q = 0` and 0 otherwise.
pub fn dim_hpq(n: usize, p: usize, q: usize) -> BigUint {
    assert!(n >= 1);
    if n == 1 {
        return if p * q == 0 { BigUint::one() } else { BigUint::zero() };
    }
    let num = BigUint::from(p + q + n - 1) * factorial((p + n - 2) as u64) * factorial((q + n - 2) as u64);
    let den = factorial(p as u64) * factorial(q as u64) * factorial((n - 1) as u64) * factorial((n - 2) as u64);
    num / den
}

/// The closed form exactly as printed in the sup-norm estimate:
/// `(p+n-2)!(q+n-2)!((p+n-1)(q+n-1) - pq) / (p! q! (n-1)!)`.
/// Undefined on `C` (it needs `(n-2)!`).
pub fn dim_hpq_printed(n: usize, p: usize, q: usize) -> Option<BigRational> {
    if n < 2 {
        return None;
    }
    let num = BigRational::from_integer(BigInt::from(factorial((p + n - 2) as u64) * factorial((q + n - 2) as u64)))
        * (int(((p + n - 1) * (q + n - 1)) as i64) - int((p * q) as i64));
    let den = BigRational::from_integer(BigInt::from(factorial(p as u64) * factorial(q as u64) * factorial((n - 1) as u64)));
    Some(num / den)
}

/// Orthogonal basis of `H_{p,q}` (orthogonal under [`coefficient_inner`],
/// not normalized).
#[derive(Clone, Debug)]
pub struct HarmonicBasis {
    pub n: usize,
    pub p: usize,
    pub q: usize,
    pub elements: Vec<BigradedPolynomial>,
    /// Diagonal of the Gram matrix; off-diagonal entries are exactly zero.
    pub gram: Vec<BigRational>,
}

impl HarmonicBasis {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Full Gram matrix, recomputed from the elements.
    pub fn gram_matrix(&self) -> Vec<Vec<ExactComplex>> {
        self.elements
            .iter()
            .map(|a| self.elements.iter().map(|b| coefficient_inner(a.poly(), b.poly())).collect())
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let elements: Vec<Vec<TermRecord>> = self.elements.iter().map(TermRecord::from_poly).collect();
        serde_json::json!({ "n": self.n, "p": self.p, "q": self.q, "elements": elements })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let file: BasisFile = serde_json::from_value(v.clone()).map_err(|e| Error::Format(e.to_string()))?;
        if !(1..=MAX_DIM).contains(&file.n) {
            return Err(Error::Format(format!("dimension {} out of range", file.n)));
        }
        let mut elements = Vec::new();
        for terms in &file.elements {
            let mut poly = Poly::zero(file.n);
            for t in terms {
                poly.add_term(t.monomial(file.n)?, t.coefficient()?);
            }
            let b = BigradedPolynomial::new(file.p, file.q, poly)?;
            if !b.is_harmonic() {
                return Err(Error::NotHarmonic(b.laplacian().poly().len()));
            }
            elements.push(b);
        }
        let gram = elements.iter().map(|e| e.sphere_l2_norm()).collect();
        Ok(HarmonicBasis { n: file.n, p: file.p, q: file.q, elements, gram })
    }
}

#[derive(Serialize, Deserialize)]
struct BasisFile {
    n: usize,
    p: usize,
    q: usize,
    elements: Vec<Vec<TermRecord>>,
}

#[derive(Serialize, Deserialize)]
struct TermRecord {
    alpha: Vec<u8>,
    beta: Vec<u8>,
    re_num: String,
    re_den: String,
    im_num: String,
    im_den: String,
}

impl TermRecord {
    fn from_poly(b: &BigradedPolynomial) -> Vec<TermRecord> {
        let n = b.n();
        b.poly()
            .terms()
            .map(|(m, c)| TermRecord {
                alpha: m.alpha[..n].to_vec(),
                beta: m.beta[..n].to_vec(),
                re_num: c.re.numer().to_string(),
                re_den: c.re.denom().to_string(),
                im_num: c.im.numer().to_string(),
                im_den: c.im.denom().to_string(),
            })
            .collect()
    }

    fn monomial(&self, n: usize) -> Result<Monomial> {
        if self.alpha.len() != n || self.beta.len() != n {
            return Err(Error::Format(format!("multi-index length differs from n = {n}")));
        }
        let mut m = Monomial::ONE;
        m.alpha[..n].copy_from_slice(&self.alpha);
        m.beta[..n].copy_from_slice(&self.beta);
        Ok(m)
    }

    fn coefficient(&self) -> Result<ExactComplex> {
        let parse = |s: &str| s.parse::<BigInt>().map_err(|e| Error::Format(format!("{s:?}: {e}")));
        let re_den = parse(&self.re_den)?;
        let im_den = parse(&self.im_den)?;
        if re_den.is_zero() || im_den.is_zero() {
            return Err(Error::Format("zero denominator".into()));
        }
        Ok(ExactComplex::new(
            BigRational::new(parse(&self.re_num)?, re_den),
            BigRational::new(parse(&self.im_num)?, im_den),
        ))
    }
}

/// Exact orthogonal basis of `ker(Laplacian)` on `P_{p,q}(C^n)`.
pub fn harmonic_basis(n: usize, p: usize, q: usize) -> HarmonicBasis {
    assert!((1..=MAX_DIM).contains(&n), "dimension out of range");
    let cols = bigraded_monomials(n, p, q);
    let kernel: Vec<Vec<BigRational>> = if p == 0 || q == 0 {
        (0..cols.len()).map(|i| (0..cols.len()).map(|j| if i == j { int(1) } else { int(0) }).collect()).collect()
    } else {
        let (mat, _) = laplacian_matrix(n, p, q);
        linalg::null_space(&mat, cols.len())
    };
    // Gram-Schmidt under the factorial-weighted inner product; the Laplacian
    // has integer entries, so real rational vectors suffice.
    let weights: Vec<BigRational> =
        cols.iter().map(|m| BigRational::from_integer(BigInt::from(m.factorial_weight()))).collect();
    let inner = |a: &[BigRational], b: &[BigRational]| -> BigRational {
        a.iter().zip(b).zip(&weights).map(|((x, y), w)| x * y * w).fold(BigRational::zero(), |s, v| s + v)
    };
    let mut ortho: Vec<Vec<BigRational>> = Vec::new();
    let mut gram: Vec<BigRational> = Vec::new();
    for v in kernel {
        let mut w = v.clone();
        for (u, g) in ortho.iter().zip(&gram) {
            let c = inner(&v, u) / g;
            if c.is_zero() {
                continue;
            }
            for (wi, ui) in w.iter_mut().zip(u) {
                *wi -= &c * ui;
            }
        }
        // Clear denominators to keep stored coefficients small.
        let l = w.iter().fold(BigInt::one(), |acc, x| num_integer::Integer::lcm(&acc, x.denom()));
        let g0 = w.iter().fold(BigInt::zero(), |acc, x| num_integer::Integer::gcd(&acc, &(x * BigRational::from_integer(l.clone())).to_integer()));
        let factor = BigRational::new(l, if g0.is_zero() { BigInt::one() } else { g0 });
        for x in &mut w {
            *x *= &factor;
        }
        let g = inner(&w, &w);
        ortho.push(w);
        gram.push(g);
    }
    let elements = ortho
        .iter()
        .map(|v| {
            let mut poly = Poly::zero(n);
            for (m, c) in cols.iter().zip(v) {
                poly.add_term(*m, ExactComplex::from_rational(c));
            }
            BigradedPolynomial { p, q, poly }
        })
        .collect();
    HarmonicBasis { n, p, q, elements, gram }
}

/// `z -> P(sigma^{-1} z)` for unitary `sigma` (rows of the matrix).
pub fn rotate_polynomial<S: Scalar>(sigma: &[Vec<S>], p: &Poly<S>, tol: f64) -> Result<Poly<S>> {
    let n = p.dim();
    if sigma.len() != n || sigma.iter().any(|r| r.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, got: sigma.len() });
    }
    // Unitarity: sigma sigma^* = I.
    let mut dev = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let mut s = S::zero();
            for k in 0..n {
                s = s + sigma[i][k].clone() * sigma[j][k].conj();
            }
            if i == j {
                s = s - S::one();
            }
            if S::EXACT {
                if !s.is_zero() {
                    dev = dev.max(s.to_c64().norm().max(f64::MIN_POSITIVE));
                }
            } else {
                dev = dev.max(s.to_c64().norm());
            }
        }
    }
    if (S::EXACT && dev > 0.0) || dev > tol {
        return Err(Error::NotUnitary(dev));
    }
    // (sigma^{-1} z)_j = sum_k conj(sigma_kj) z_k
    let lin: Vec<Poly<S>> = (0..n)
        .map(|j| {
            let mut l = Poly::zero(n);
            for (k, row) in sigma.iter().enumerate() {
                l.add_term(Monomial::z(k), row[j].conj());
            }
            l
        })
        .collect();
    let lin_bar: Vec<Poly<S>> = lin.iter().map(|l| l.conj()).collect();
    let mut out = Poly::zero(n);
    for (m, c) in p.terms() {
        let mut term = Poly::constant(n, c.clone());
        for j in 0..n {
            for _ in 0..m.alpha[j] {
                term = term.mul(&lin[j]);
            }
            for _ in 0..m.beta[j] {
                term = term.mul(&lin_bar[j]);
            }
        }
        out.add_scaled(&term, &S::one());
    }
    if !S::EXACT {
        out = out.pruned(tol);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{cx, rat};

    fn c(re: i64) -> ExactComplex {
        cx(int(re), int(0))
    }

    #[test]
    fn laplacian_examples() {
        let p = BigradedPolynomial::monomial(2, Monomial::new([1, 0, 0, 0], [0, 1, 0, 0]), c(1));
        assert!(p.laplacian().is_zero());
        let p = BigradedPolynomial::monomial(1, Monomial::new([1, 0, 0, 0], [1, 0, 0, 0]), c(1));
        assert_eq!(p.laplacian().poly().coefficient(&Monomial::ONE), c(4));
        let mut s = Poly::zero(2);
        s.add_term(Monomial::new([1, 0, 0, 0], [1, 0, 0, 0]), c(1));
        s.add_term(Monomial::new([0, 1, 0, 0], [0, 1, 0, 0]), c(1));
        let s = BigradedPolynomial::new(1, 1, s).unwrap();
        assert_eq!(s.laplacian().poly().coefficient(&Monomial::ONE), c(8));
    }

    #[test]
    fn dimension_examples() {
        for n in 1..=4 {
            assert_eq!(dim_hpq(n, 0, 0), BigUint::one());
        }
        assert_eq!(dim_hpq(2, 1, 1), BigUint::from(3u32));
        assert_eq!(dim_hpq(2, 1, 0), BigUint::from(2u32));
        assert_eq!(dim_hpq_printed(2, 1, 1), Some(int(3)));
        // printed value carries an extra (n-1)!
        assert_eq!(dim_hpq_printed(3, 0, 0), Some(int(2)));
    }

    #[test]
    fn basis_examples() {
        let b = harmonic_basis(2, 1, 0);
        assert_eq!(b.len(), 2);
        let b = harmonic_basis(1, 1, 1);
        assert!(b.is_empty());
        let b = harmonic_basis(2, 1, 1);
        assert_eq!(b.len(), 3);
        for e in &b.elements {
            assert!(e.is_harmonic());
        }
        let g = b.gram_matrix();
        for (i, row) in g.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                assert_eq!(i == j, !v.is_zero());
            }
        }
    }

    #[test]
    fn basis_size_matches_dimension() {
        for n in 1..=3 {
            for p in 0..=3 {
                for q in 0..=3 {
                    let b = harmonic_basis(n, p, q);
                    assert_eq!(BigUint::from(b.len()), dim_hpq(n, p, q), "n={n} p={p} q={q}");
                }
            }
        }
    }

    #[test]
    fn norm_examples() {
        let z1 = BigradedPolynomial::monomial(2, Monomial::z(0), c(1));
        assert_eq!(z1.sphere_l2_norm(), int(1));
        let z1sq = BigradedPolynomial::monomial(2, Monomial::new([2, 0, 0, 0], [0; 4]), c(1));
        assert_eq!(z1sq.sphere_l2_norm(), int(2));
        assert_eq!(BigradedPolynomial::zero(2, 1, 1).sphere_l2_norm(), int(0));
    }

    #[test]
    fn rotation_examples() {
        let i = cx(int(0), int(1));
        let z1 = Poly::monomial(2, Monomial::z(0), c(1));
        let id = vec![vec![c(1), c(0)], vec![c(0), c(1)]];
        assert_eq!(rotate_polynomial(&id, &z1, 0.0).unwrap(), z1);
        let phase = vec![vec![i.clone(), c(0)], vec![c(0), c(1)]];
        let r = rotate_polynomial(&phase, &z1, 0.0).unwrap();
        assert_eq!(r.coefficient(&Monomial::z(0)), cx(int(0), int(-1)));
        let swap = vec![vec![c(0), c(1)], vec![c(1), c(0)]];
        let p = Poly::monomial(2, Monomial::new([1, 0, 0, 0], [0, 1, 0, 0]), c(1));
        let r = rotate_polynomial(&swap, &p, 0.0).unwrap();
        assert_eq!(r, Poly::monomial(2, Monomial::new([0, 1, 0, 0], [1, 0, 0, 0]), c(1)));
        let bad = vec![vec![c(2), c(0)], vec![c(0), c(1)]];
        assert!(rotate_polynomial(&bad, &p, 0.0).is_err());
        let _ = rat(1, 2);
    }

    #[test]
    fn json_round_trip() {
        let b = harmonic_basis(2, 2, 1);
        let v = b.to_json();
        let back = HarmonicBasis::from_json(&v).unwrap();
        assert_eq!(back.elements, b.elements);
    }
}
