use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::exact::int;
use crate::poly::{bigraded_monomials, Monomial};

/// Integer matrix of the Laplacian `P_{p,q} -> P_{p-1,q-1}` in the monomial
/// bases, with the row monomials.
pub fn laplacian_matrix(n: usize, p: usize, q: usize) -> (Vec<Vec<i64>>, Vec<Monomial>) {
    let cols = bigraded_monomials(n, p, q);
    if p == 0 || q == 0 {
        return (Vec::new(), Vec::new());
    }
    let rows = bigraded_monomials(n, p - 1, q - 1);
    let index: HashMap<Monomial, usize> = rows.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    let mut mat = vec![vec![0i64; cols.len()]; rows.len()];
    for (c, m) in cols.iter().enumerate() {
        for j in 0..n {
            let (a, b) = (m.alpha[j], m.beta[j]);
            if a > 0 && b > 0 {
                let mut t = *m;
                t.alpha[j] -= 1;
                t.beta[j] -= 1;
                mat[index[&t]][c] += 4 * a as i64 * b as i64;
            }
        }
    }
    (mat, rows)
}

const PRIME: u64 = (1 << 61) - 1;

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % PRIME as u128) as u64
}

fn powmod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a);
        }
        a = mulmod(a, a);
        e >>= 1;
    }
    r
}

/// Rank modulo the Mersenne prime `2^61 - 1`; a lower bound for the rational rank.
pub(crate) fn rank_mod_prime(mat: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<u64>> =
        mat.iter().map(|r| r.iter().map(|&v| v.rem_euclid(PRIME as i64) as u64).collect()).collect();
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| m[r][c] != 0) else { continue };
        m.swap(rank, piv);
        let inv = powmod(m[rank][c], PRIME - 2);
        for r in 0..rows {
            if r != rank && m[r][c] != 0 {
                let f = mulmod(m[r][c], inv);
                for k in c..cols {
                    let sub = mulmod(f, m[rank][k]);
                    m[r][k] = (m[r][k] + PRIME - sub) % PRIME;
                }
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Reduced row echelon form over the rationals; returns pivot columns.
fn rref(mat: &[Vec<i64>], cols: usize) -> (Vec<Vec<BigRational>>, Vec<usize>) {
    let mut m: Vec<Vec<BigRational>> = mat.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect();
    let rows = m.len();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| !m[r][c].is_zero()) else { continue };
        m.swap(rank, piv);
        let inv = BigRational::one() / m[rank][c].clone();
        for k in c..cols {
            let v = &m[rank][k] * &inv;
            m[rank][k] = v;
        }
        for r in 0..rows {
            if r != rank && !m[r][c].is_zero() {
                let f = m[r][c].clone();
                for k in c..cols {
                    if m[rank][k].is_zero() {
                        continue;
                    }
                    let sub = &f * &m[rank][k];
                    m[r][k] -= sub;
                }
            }
        }
        pivots.push(c);
        rank += 1;
        if rank == rows {
            break;
        }
    }
    m.truncate(rank);
    (m, pivots)
}

/// Exact basis of the null space of `mat` (`cols` columns).
pub(crate) fn null_space(mat: &[Vec<i64>], cols: usize) -> Vec<Vec<BigRational>> {
    let (r, pivots) = rref(mat, cols);
    let mut out = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![BigRational::zero(); cols];
        v[free] = BigRational::one();
        for (row, &pc) in r.iter().zip(&pivots) {
            v[pc] = -row[free].clone();
        }
        out.push(v);
    }
    out
}

/// `dim ker(Laplacian)` on `P_{p,q}(C^n)`. Full rank modulo a large prime
/// certifies full rational rank; otherwise falls back to exact elimination.
pub fn kernel_dimension(n: usize, p: usize, q: usize) -> usize {
    let cols = bigraded_monomials(n, p, q).len();
    if p == 0 || q == 0 {
        return cols;
    }
    let (mat, rows) = laplacian_matrix(n, p, q);
    let r = rank_mod_prime(&mat);
    if r == rows.len() {
        return cols - r;
    }
    let (_, pivots) = rref(&mat, cols);
    cols - pivots.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonics::dim_hpq;
    use num_bigint::BigUint;

    #[test]
    fn modular_and_exact_ranks_agree() {
        for (n, p, q) in [(2, 2, 2), (3, 2, 1), (3, 2, 2)] {
            let (mat, _) = laplacian_matrix(n, p, q);
            let cols = bigraded_monomials(n, p, q).len();
            let (_, piv) = rref(&mat, cols);
            assert_eq!(rank_mod_prime(&mat), piv.len());
        }
    }

    #[test]
    fn kernel_matches_dimension_formula() {
        for n in 1..=4 {
            for p in 0..=4 {
                for q in 0..=4 {
                    assert_eq!(BigUint::from(kernel_dimension(n, p, q)), dim_hpq(n, p, q), "n={n} p={p} q={q}");
                }
            }
        }
    }

    #[test]
    fn null_vectors_are_annihilated() {
        let (mat, _) = laplacian_matrix(3, 2, 2);
        let cols = bigraded_monomials(3, 2, 2).len();
        for v in null_space(&mat, cols) {
            for row in &mat {
                let s = row.iter().zip(&v).fold(BigRational::zero(), |acc, (a, b)| acc + int(*a) * b);
                assert!(s.is_zero());
            }
        }
    }
}
