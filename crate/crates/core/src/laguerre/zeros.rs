//! Exact real-root isolation by Sturm sequences on integer-cleared
//! coefficients, bisecting on a fixed dyadic grid.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::laguerre_coeffs;

/// Isolating interval `(lo, hi]` holding exactly one real root.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RootInterval {
    pub lo: f64,
    pub hi: f64,
    #[serde(skip)]
    lo_num: BigInt,
    #[serde(skip)]
    hi_num: BigInt,
    #[serde(skip)]
    exponent: u32,
}

impl RootInterval {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn lo_exact(&self) -> BigRational {
        BigRational::new(self.lo_num.clone(), BigInt::one() << self.exponent)
    }

    pub fn hi_exact(&self) -> BigRational {
        BigRational::new(self.hi_num.clone(), BigInt::one() << self.exponent)
    }

    fn overlaps(&self, other: &RootInterval) -> bool {
        debug_assert_eq!(self.exponent, other.exponent);
        self.lo_num < other.hi_num && other.lo_num < self.hi_num
    }
}

/// Result of comparing the real zeros of two Laguerre polynomials.
#[derive(Clone, Debug, Serialize)]
pub struct ZeroScan {
    pub k1: usize,
    pub k2: usize,
    pub order: String,
    pub interval: [f64; 2],
    pub resolution: f64,
    pub zeros1: Vec<RootInterval>,
    pub zeros2: Vec<RootInterval>,
    /// Index pairs whose isolating intervals still overlap at the resolution.
    pub candidates: Vec<(usize, usize)>,
    /// Degree of the exact gcd; zero means no common root anywhere in C.
    pub gcd_degree: usize,
}

fn clear_denominators(c: &[BigRational]) -> Vec<BigInt> {
    let l = c.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    c.iter().map(|v| (v * BigRational::from_integer(l.clone())).to_integer()).collect()
}

fn trim(c: &mut Vec<BigRational>) {
    while c.last().is_some_and(|v| v.is_zero()) {
        c.pop();
    }
}

/// Remainder of `a / b` over the rationals (coefficients lowest first).
fn poly_rem(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    let lead = b[db].clone();
    while r.len() > db && !r.is_empty() {
        let shift = r.len() - 1 - db;
        let f = r[r.len() - 1].clone() / lead.clone();
        for (i, bi) in b.iter().enumerate() {
            r[shift + i] -= f.clone() * bi;
        }
        r.pop();
        trim(&mut r);
    }
    r
}

/// Exact monic gcd of two rational polynomials.
pub fn poly_gcd(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let r = poly_rem(&x, &y);
        x = y;
        y = r;
    }
    if let Some(l) = x.last().cloned() {
        for v in &mut x {
            *v /= l.clone();
        }
    }
    x
}

fn sturm_chain(p: &[BigRational]) -> Vec<Vec<BigInt>> {
    let mut p0 = p.to_vec();
    trim(&mut p0);
    let mut chain = vec![p0.clone()];
    let mut p1: Vec<BigRational> =
        p0.iter().enumerate().skip(1).map(|(i, v)| v * BigRational::from_integer(BigInt::from(i))).collect();
    trim(&mut p1);
    let mut prev = p0;
    while !p1.is_empty() {
        chain.push(p1.clone());
        let r: Vec<BigRational> = poly_rem(&prev, &p1).into_iter().map(|v| -v).collect();
        prev = p1;
        p1 = r;
    }
    chain.iter().map(|c| clear_denominators(c)).collect()
}

/// Sign of `p(num / 2^e)` via Horner on integers.
fn sign_at(p: &[BigInt], num: &BigInt, e: u32) -> i32 {
    // 2^{e d} p(num / 2^e) = sum c_i num^i 2^{e (d - i)}
    let d = p.len().saturating_sub(1);
    let mut total = BigInt::zero();
    let mut pow = BigInt::one();
    for (i, c) in p.iter().enumerate() {
        total += (c * &pow) << (e as usize * (d - i));
        pow *= num;
    }
    if total.is_positive() {
        1
    } else if total.is_negative() {
        -1
    } else {
        0
    }
}

fn variations(chain: &[Vec<BigInt>], num: &BigInt, e: u32) -> usize {
    let mut last = 0;
    let mut count = 0;
    for p in chain {
        let s = sign_at(p, num, e);
        if s == 0 {
            continue;
        }
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

fn to_f64(num: &BigInt, e: u32) -> f64 {
    num.to_f64().unwrap_or(f64::NAN) / 2f64.powi(e as i32)
}

fn grid_exponent(resolution: f64) -> u32 {
    let r = resolution.clamp(1e-30, 1.0);
    ((1.0 / r).log2().ceil() as u32) + 2
}

/// Isolates all real roots of `coeffs` in `(lo, hi]` into intervals of
/// width at most `resolution`.
pub fn isolate_real_roots(coeffs: &[BigRational], lo: f64, hi: f64, resolution: f64) -> Vec<RootInterval> {
    let e = grid_exponent(resolution);
    isolate_on_grid(&sturm_chain(coeffs), lo, hi, resolution, e)
}

fn isolate_on_grid(chain: &[Vec<BigInt>], lo: f64, hi: f64, resolution: f64, e: u32) -> Vec<RootInterval> {
    let scale = 2f64.powi(e as i32);
    let lo_num = BigInt::from((lo * scale).floor() as i128);
    let hi_num = BigInt::from((hi * scale).ceil() as i128);
    let max_width = BigInt::from(((resolution * scale).floor() as i128).max(1));
    let mut out = Vec::new();
    let mut stack = vec![(lo_num.clone(), hi_num.clone(), variations(chain, &lo_num, e), variations(chain, &hi_num, e))];
    while let Some((a, b, va, vb)) = stack.pop() {
        let count = va.saturating_sub(vb);
        if count == 0 {
            continue;
        }
        if count == 1 && &b - &a <= max_width {
            out.push(RootInterval { lo: to_f64(&a, e), hi: to_f64(&b, e), lo_num: a, hi_num: b, exponent: e });
            continue;
        }
        if &b - &a <= BigInt::one() {
            // Cannot split further on this grid; keep the cluster.
            out.push(RootInterval { lo: to_f64(&a, e), hi: to_f64(&b, e), lo_num: a, hi_num: b, exponent: e });
            continue;
        }
        let mid: BigInt = (&a + &b) >> 1usize;
        let vm = variations(chain, &mid, e);
        stack.push((mid.clone(), b, vm, vb));
        stack.push((a, mid, va, vm));
    }
    out.sort_by(|x, y| x.lo_num.cmp(&y.lo_num));
    out
}

fn refine(chain: &[Vec<BigInt>], iv: &RootInterval, extra_bits: u32) -> RootInterval {
    let e = iv.exponent + extra_bits;
    let a = &iv.lo_num << extra_bits as usize;
    let b = &iv.hi_num << extra_bits as usize;
    let mut lo = a;
    let mut hi = b;
    let mut vlo = variations(chain, &lo, e);
    let one = BigInt::one();
    while &hi - &lo > one {
        let mid: BigInt = (&lo + &hi) >> 1usize;
        let vm = variations(chain, &mid, e);
        if vlo > vm {
            hi = mid;
        } else {
            lo = mid;
            vlo = vm;
        }
    }
    RootInterval { lo: to_f64(&lo, e), hi: to_f64(&hi, e), lo_num: lo, hi_num: hi, exponent: e }
}

/// Compares the real zeros of `L_{k1}^order` and `L_{k2}^order` on `[0, x_max]`.
pub fn common_zero_scan(k1: usize, k2: usize, order: &BigRational, x_max: f64, resolution: f64) -> ZeroScan {
    let c1 = laguerre_coeffs(k1, order);
    let c2 = laguerre_coeffs(k2, order);
    let e = grid_exponent(resolution);
    let ch1 = sturm_chain(&c1);
    let ch2 = sturm_chain(&c2);
    let zeros1 = isolate_on_grid(&ch1, 0.0, x_max, resolution, e);
    let zeros2 = isolate_on_grid(&ch2, 0.0, x_max, resolution, e);
    let mut candidates = Vec::new();
    for (i, a) in zeros1.iter().enumerate() {
        for (j, b) in zeros2.iter().enumerate() {
            if a.overlaps(b) {
                // Overlap at the working grid: refine both before reporting.
                let ra = refine(&ch1, a, 24);
                let rb = refine(&ch2, b, 24);
                if ra.overlaps(&rb) {
                    candidates.push((i, j));
                }
            }
        }
    }
    let g = poly_gcd(&c1, &c2);
    ZeroScan {
        k1,
        k2,
        order: order.to_string(),
        interval: [0.0, x_max],
        resolution,
        zeros1,
        zeros2,
        candidates,
        gcd_degree: g.len().saturating_sub(1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;
    use crate::laguerre::{laguerre_coeffs_int, laguerre_eval};

    #[test]
    fn isolates_laguerre_zeros() {
        for k in 1..=12 {
            let c = laguerre_coeffs_int(k, 1);
            let roots = isolate_real_roots(&c, 0.0, 200.0, 1e-12);
            assert_eq!(roots.len(), k, "L_{k}^1 has {k} positive zeros");
            for r in &roots {
                assert!(r.width() <= 1e-12);
                let fl = laguerre_eval(k, 1.0, r.lo);
                let fh = laguerre_eval(k, 1.0, r.hi);
                assert!(fl * fh <= 0.0 || fl.abs() < 1e-9 || fh.abs() < 1e-9);
            }
        }
    }

    #[test]
    fn exact_root_at_grid_point() {
        // (x - 1)(x - 3) = 3 - 4x + x^2
        let c = vec![int(3), int(-4), int(1)];
        let roots = isolate_real_roots(&c, 0.0, 8.0, 1e-6);
        assert_eq!(roots.len(), 2);
        assert!((roots[0].midpoint() - 1.0).abs() < 1e-6);
        assert!((roots[1].midpoint() - 3.0).abs() < 1e-6);
    }

    #[test]
    fn scan_examples() {
        assert!(common_zero_scan(0, 1, &int(0), 30.0, 1e-12).candidates.is_empty());
        let s = common_zero_scan(1, 2, &int(0), 30.0, 1e-12);
        assert!(s.candidates.is_empty());
        assert_eq!(s.gcd_degree, 0);
        let s = common_zero_scan(3, 4, &int(1), 30.0, 1e-12);
        assert!(s.candidates.is_empty());
        assert_eq!(s.zeros1.len(), 3);
        assert_eq!(s.zeros2.len(), 4);
    }

    #[test]
    fn shared_factor_is_detected() {
        let a = vec![int(-2), int(1)]; // x - 2
        let b = vec![int(6), int(-5), int(1)]; // (x-2)(x-3)
        let g = poly_gcd(&a, &b);
        assert_eq!(g, vec![int(-2), int(1)]);
    }
}
