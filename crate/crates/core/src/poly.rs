//! Sparse polynomials in `z_1..z_n, zbar_1..zbar_n`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{factorial, Scalar};

/// Largest supported complex dimension.
pub const MAX_DIM: usize = 4;

pub type MultiIndex = [u8; MAX_DIM];

/// `z^alpha zbar^beta`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default, Serialize, Deserialize)]
pub struct Monomial {
    pub alpha: MultiIndex,
    pub beta: MultiIndex,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { alpha: [0; MAX_DIM], beta: [0; MAX_DIM] };

    pub fn new(alpha: MultiIndex, beta: MultiIndex) -> Self {
        Monomial { alpha, beta }
    }

    pub fn z(j: usize) -> Self {
        let mut m = Self::ONE;
        m.alpha[j] = 1;
        m
    }

    pub fn zbar(j: usize) -> Self {
        let mut m = Self::ONE;
        m.beta[j] = 1;
        m
    }

    pub fn holomorphic_degree(&self) -> usize {
        self.alpha.iter().map(|&a| a as usize).sum()
    }

    pub fn antiholomorphic_degree(&self) -> usize {
        self.beta.iter().map(|&b| b as usize).sum()
    }

    pub fn degree(&self) -> usize {
        self.holomorphic_degree() + self.antiholomorphic_degree()
    }

    /// `alpha! beta!`
    pub fn factorial_weight(&self) -> BigUint {
        self.alpha
            .iter()
            .chain(self.beta.iter())
            .fold(BigUint::one(), |acc, &e| acc * factorial(e as u64))
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = *self;
        for j in 0..MAX_DIM {
            out.alpha[j] += other.alpha[j];
            out.beta[j] += other.beta[j];
        }
        out
    }

    /// The monomial of `conj(z^alpha zbar^beta) = z^beta zbar^alpha`.
    pub fn conj(&self) -> Monomial {
        Monomial { alpha: self.beta, beta: self.alpha }
    }

    /// Largest variable index used, plus one.
    pub fn span(&self) -> usize {
        (0..MAX_DIM).rev().find(|&j| self.alpha[j] != 0 || self.beta[j] != 0).map_or(0, |j| j + 1)
    }

    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(1.0, 0.0);
        for (j, zj) in z.iter().enumerate().take(MAX_DIM) {
            if self.alpha[j] > 0 {
                acc *= zj.powu(self.alpha[j] as u32);
            }
            if self.beta[j] > 0 {
                acc *= zj.conj().powu(self.beta[j] as u32);
            }
        }
        acc
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for j in 0..MAX_DIM {
            for (exp, name) in [(self.alpha[j], "z"), (self.beta[j], "zb")] {
                if exp == 0 {
                    continue;
                }
                if !first {
                    write!(f, "*")?;
                }
                first = false;
                if exp == 1 {
                    write!(f, "{}{}", name, j + 1)?;
                } else {
                    write!(f, "{}{}^{}", name, j + 1, exp)?;
                }
            }
        }
        if first {
            write!(f, "1")?;
        }
        Ok(())
    }
}

/// All multi-indices in `n` variables of total degree `d`, lexicographically
/// descending in the first coordinate.
pub fn multi_indices(n: usize, d: usize) -> Vec<MultiIndex> {
    fn rec(n: usize, j: usize, left: usize, cur: &mut MultiIndex, out: &mut Vec<MultiIndex>) {
        if j + 1 == n {
            cur[j] = left as u8;
            out.push(*cur);
            cur[j] = 0;
            return;
        }
        for e in (0..=left).rev() {
            cur[j] = e as u8;
            rec(n, j + 1, left - e, cur, out);
        }
        cur[j] = 0;
    }
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    let mut cur = [0u8; MAX_DIM];
    rec(n, 0, d, &mut cur, &mut out);
    out
}

/// Monomial basis of `P_{p,q}` on `C^n`.
pub fn bigraded_monomials(n: usize, p: usize, q: usize) -> Vec<Monomial> {
    let alphas = multi_indices(n, p);
    let betas = multi_indices(n, q);
    let mut out = Vec::with_capacity(alphas.len() * betas.len());
    for a in &alphas {
        for b in &betas {
            out.push(Monomial::new(*a, *b));
        }
    }
    out
}

/// Sparse polynomial in `(z, zbar)` with coefficients in `S`.
#[derive(Clone, PartialEq, Debug)]
pub struct Poly<S> {
    n: usize,
    terms: BTreeMap<Monomial, S>,
}

impl<S: Scalar> Poly<S> {
    pub fn zero(n: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&n), "dimension {n} out of range");
        Poly { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: S) -> Self {
        let mut p = Self::zero(n);
        p.add_term(Monomial::ONE, c);
        p
    }

    pub fn monomial(n: usize, m: Monomial, c: S) -> Self {
        let mut p = Self::zero(n);
        p.add_term(m, c);
        p
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (Monomial, S)>) -> Result<Self> {
        let mut p = Self::zero(n);
        for (m, c) in terms {
            if m.span() > n {
                return Err(Error::invalid(format!("monomial {m} uses a variable beyond dimension {n}")));
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &S)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> S {
        self.terms.get(m).cloned().unwrap_or_else(S::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: S) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = e.get().clone() + c;
                if v.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Poly<S>, c: &S) {
        debug_assert_eq!(self.n, other.n);
        if c.is_zero() {
            return;
        }
        for (m, v) in &other.terms {
            self.add_term(*m, v.clone() * c.clone());
        }
    }

    pub fn scale(&self, c: &S) -> Poly<S> {
        if c.is_zero() {
            return Self::zero(self.n);
        }
        Poly {
            n: self.n,
            terms: self
                .terms
                .iter()
                .filter_map(|(m, v)| {
                    let w = v.clone() * c.clone();
                    (!w.is_zero()).then_some((*m, w))
                })
                .collect(),
        }
    }

    pub fn mul(&self, other: &Poly<S>) -> Poly<S> {
        let mut out = Self::zero(self.n.max(other.n));
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca.clone() * cb.clone());
            }
        }
        out
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Poly<S> {
        Poly { n: self.n, terms: self.terms.iter().map(|(k, v)| (k.mul(m), v.clone())).collect() }
    }

    pub fn mul_z(&self, j: usize) -> Poly<S> {
        self.mul_monomial(&Monomial::z(j))
    }

    pub fn mul_zbar(&self, j: usize) -> Poly<S> {
        self.mul_monomial(&Monomial::zbar(j))
    }

    /// `d/dz_j`
    pub fn d_z(&self, j: usize) -> Poly<S> {
        let mut out = Self::zero(self.n);
        for (m, c) in &self.terms {
            let e = m.alpha[j];
            if e == 0 {
                continue;
            }
            let mut k = *m;
            k.alpha[j] -= 1;
            out.add_term(k, c.clone() * S::from_rational(&BigRational::from_integer(e.into())));
        }
        out
    }

    /// `d/dzbar_j`
    pub fn d_zbar(&self, j: usize) -> Poly<S> {
        let mut out = Self::zero(self.n);
        for (m, c) in &self.terms {
            let e = m.beta[j];
            if e == 0 {
                continue;
            }
            let mut k = *m;
            k.beta[j] -= 1;
            out.add_term(k, c.clone() * S::from_rational(&BigRational::from_integer(e.into())));
        }
        out
    }

    /// The polynomial `z -> conj(P(z))`.
    pub fn conj(&self) -> Poly<S> {
        Poly { n: self.n, terms: self.terms.iter().map(|(m, c)| (m.conj(), c.conj())).collect() }
    }

    pub fn max_degree(&self) -> usize {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        self.terms.iter().map(|(m, c)| c.to_c64() * m.eval(z)).sum()
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Poly<T> {
        let mut out = Poly::<T>::zero(self.n);
        for (m, c) in &self.terms {
            out.add_term(*m, f(c));
        }
        out
    }

    pub fn to_c64(&self) -> Poly<Complex64> {
        self.map(|c| c.to_c64())
    }

    /// Drops terms whose coefficient is negligible under `tol`.
    pub fn pruned(&self, tol: f64) -> Poly<S> {
        Poly {
            n: self.n,
            terms: self.terms.iter().filter(|(_, c)| !c.is_negligible(tol)).map(|(m, c)| (*m, c.clone())).collect(),
        }
    }

    pub fn restrict_degree(&self, max_degree: usize) -> Poly<S> {
        Poly {
            n: self.n,
            terms: self.terms.iter().filter(|(m, _)| m.degree() <= max_degree).map(|(m, c)| (*m, c.clone())).collect(),
        }
    }

    /// Exact Laplacian `4 sum_j d^2/dz_j dzbar_j`.
    pub fn laplacian(&self) -> Poly<S> {
        let four = S::from_rational(&BigRational::from_integer(4.into()));
        let mut out = Self::zero(self.n);
        for j in 0..self.n {
            out.add_scaled(&self.d_z(j).d_zbar(j), &four);
        }
        out
    }

    /// `sum |c|^2 alpha! beta!` as a float.
    pub fn coefficient_norm_sq_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| c.norm_sqr_f64() * crate::exact::rat_to_f64(&BigRational::from_integer(m.factorial_weight().into())))
            .sum()
    }
}

impl<S: Scalar> std::ops::Add for &Poly<S> {
    type Output = Poly<S>;
    fn add(self, rhs: &Poly<S>) -> Poly<S> {
        let mut out = self.clone();
        out.add_scaled(rhs, &S::one());
        out
    }
}

impl<S: Scalar> std::ops::Sub for &Poly<S> {
    type Output = Poly<S>;
    fn sub(self, rhs: &Poly<S>) -> Poly<S> {
        let mut out = self.clone();
        out.add_scaled(rhs, &(-S::one()));
        out
    }
}

impl<S: Scalar + fmt::Display> fmt::Display for Poly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})*{m}")?;
        }
        Ok(())
    }
}

/// Exact zero test for polynomials whose coefficients are floats is never
/// meaningful; this helper reports the largest coefficient modulus instead.
pub fn max_coefficient<S: Scalar>(p: &Poly<S>) -> f64 {
    p.terms().map(|(_, c)| c.to_c64().norm()).fold(0.0, f64::max)
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;

    #[test]
    fn multi_index_counts() {
        assert_eq!(multi_indices(2, 3).len(), 4);
        assert_eq!(multi_indices(3, 2).len(), 6);
        assert_eq!(multi_indices(4, 4).len(), 35);
        assert_eq!(bigraded_monomials(2, 1, 1).len(), 4);
    }

    #[test]
    fn derivatives_and_products() {
        // P = z1^2 zb1
        let p = Poly::<BigRational>::monomial(1, Monomial::new([2, 0, 0, 0], [1, 0, 0, 0]), int(3));
        let dz = p.d_z(0);
        assert_eq!(dz.coefficient(&Monomial::new([1, 0, 0, 0], [1, 0, 0, 0])), int(6));
        let lap = p.laplacian();
        // 4 * d/dz d/dzb (3 z^2 zb) = 4 * 6 z = 24 z
        assert_eq!(lap.coefficient(&Monomial::z(0)), int(24));
        assert_eq!(lap.len(), 1);
    }

    #[test]
    fn monomial_display() {
        assert_eq!(Monomial::new([2, 0, 0, 0], [0, 1, 0, 0]).to_string(), "z1^2*zb2");
        assert_eq!(Monomial::ONE.to_string(), "1");
    }
}
