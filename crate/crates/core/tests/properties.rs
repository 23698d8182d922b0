//! Property tests for the invariants of each module.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use twisted_core::exact::{cx, factorial_rat, int, rat, ExactComplex};
use twisted_core::harmonics::{dim_hpq, harmonic_basis, rotate_polynomial, sph_coefficients, SphereRule};
use twisted_core::laguerre::{
    eval_phi, laguerre_coeffs, phi_norm_sq_f64, phi_radial, recursion_residuals, GeneralizedLaguerreSpec,
};
use twisted_core::poly::Monomial;
use twisted_core::quadrature::RadialRule;
use twisted_core::spectral::{corpus, extract_expansion, special_hermite_reconstruct, BasisCache, ExpansionOptions};
use twisted_core::twisted::{
    convolve_grids, twisted_spherical_mean, GridFunction, GridSpec, PhiField, RadialProfile, SphereMeasureSpec, TypeField,
};
use twisted_core::weyl::{
    apply_tau, apply_tau_prime, apply_w, apply_w_plus, commutator_check, phi_gaussian, verify_harmonic_ladder, GaussianPolynomial,
    LadderConvention,
};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn point(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b)| c(a, b)), n)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

// Unit complex numbers with rational coordinates, for exact rotations.
const PHASES: [(i64, i64, i64); 6] = [(1, 0, 1), (0, 1, 1), (-1, 0, 1), (3, 4, 5), (-5, 12, 13), (8, -15, 17)];

fn phase(i: usize) -> ExactComplex {
    let (a, b, d) = PHASES[i % PHASES.len()];
    cx(rat(a, d), rat(b, d))
}

/// Permutation matrix times a diagonal of exact unit phases.
fn exact_unitary(n: usize, perm_seed: usize, phases: &[usize]) -> Vec<Vec<ExactComplex>> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.rotate_left(perm_seed % n);
    (0..n)
        .map(|i| (0..n).map(|j| if perm[i] == j { phase(phases[i]) } else { cx(int(0), int(0)) }).collect())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn laguerre_coefficient_list_shape(k in 0usize..20, num in -12i64..12, den in 1i64..6) {
        let cs = laguerre_coeffs(k, &rat(num, den));
        prop_assert_eq!(cs.len(), k + 1);
        let sign = if k % 2 == 0 { int(1) } else { int(-1) };
        prop_assert_eq!(cs[k].clone(), sign / factorial_rat(k as u64));
    }

    #[test]
    fn laguerre_recursions_exact(k in 0usize..=12, order in 0i64..=8, frac in prop::option::of((1i64..7, 2i64..9))) {
        let o = match frac {
            Some((a, b)) => int(order) + rat(a, b),
            None => int(order),
        };
        let (d, s) = recursion_residuals(k, &o);
        prop_assert!(d.is_empty() && s.is_empty(), "k = {k}, order = {o}: {d:?} {s:?}");
    }

    #[test]
    fn phi_is_radial(k in 0usize..8, n in 1usize..=3, z in point(3), perm in 0usize..3, t in 0u32..16) {
        let z = &z[..n];
        let base = eval_phi(k, n, z);
        let angle = std::f64::consts::TAU * t as f64 / 16.0;
        let mut w: Vec<Complex64> = z.iter().enumerate().map(|(j, v)| v * Complex64::from_polar(1.0, angle * (j + 1) as f64)).collect();
        w.rotate_left(perm % n);
        let scale = 1.0 + base.abs();
        prop_assert!((eval_phi(k, n, &w) - base).abs() <= 1e-12 * scale);
    }

    #[test]
    fn generalized_pochhammer_and_membership(re_num in -20i64..20, re_den in 1i64..8, im_num in -6i64..6, im_den in 1i64..5) {
        let a = cx(rat(re_num, re_den), rat(im_num, im_den));
        let admissible = a.re < int(1) && !(a.im.is_zero() && a.re.is_integer() && a.re <= int(0));
        let spec = GeneralizedLaguerreSpec::new(a.clone(), 1, 12);
        prop_assert_eq!(spec.is_ok(), admissible, "a = {}", a);
        if let Ok(spec) = spec {
            let poch = spec.pochhammer();
            prop_assert!(poch[0].is_one());
            for s in 0..poch.len() - 1 {
                let next = poch[s].clone() * (a.clone() + cx(int(s as i64), int(0)));
                prop_assert_eq!(poch[s + 1].clone(), next);
            }
        }
    }

    #[test]
    fn generalized_recursions_within_tail(re_num in -9i64..9, im_num in -4i64..4, order in 0usize..3, x in 0.01f64..20.0) {
        let a = cx(rat(2 * re_num + 1, 10), rat(im_num, 3));
        prop_assume!(twisted_core::laguerre::in_c_sharp(&a));
        let spec = GeneralizedLaguerreSpec::new(a, order, 40).unwrap();
        let r = spec.recursion_residuals(x).unwrap();
        prop_assert!(r.derivative <= r.bound && r.sum <= r.bound, "{r:?}");
    }

    #[test]
    fn basis_is_harmonic_with_formula_size(n in 1usize..=3, p in 0usize..=3, q in 0usize..=3) {
        let b = harmonic_basis(n, p, q);
        prop_assert_eq!(num_bigint::BigUint::from(b.len()), dim_hpq(n, p, q));
        for e in &b.elements {
            prop_assert!(e.laplacian().is_zero());
            for (m, _) in e.poly().terms() {
                prop_assert_eq!((m.holomorphic_degree(), m.antiholomorphic_degree()), (p, q));
            }
        }
    }

    #[test]
    fn bigraded_evaluation_is_homogeneous(n in 1usize..=3, p in 0usize..=2, q in 0usize..=2, w in point(3), rho in 0.1f64..3.0) {
        let b = harmonic_basis(n, p, q);
        prop_assume!(!b.is_empty());
        let w = &w[..n];
        let scaled: Vec<Complex64> = w.iter().map(|v| v * rho).collect();
        for e in &b.elements {
            let lhs = e.eval(&scaled);
            let rhs = e.eval(w) * rho.powi((p + q) as i32);
            prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + rhs.norm()));
        }
    }

    #[test]
    fn rotations_preserve_sphere_norm(n in 1usize..=3, p in 0usize..=2, q in 0usize..=2, perm in 0usize..3, ph in prop::collection::vec(0usize..6, 3)) {
        let b = harmonic_basis(n, p, q);
        prop_assume!(!b.is_empty());
        let sigma = exact_unitary(n, perm, &ph);
        for e in &b.elements {
            let r = rotate_polynomial(&sigma, e.poly(), 0.0).unwrap();
            let re = twisted_core::harmonics::BigradedPolynomial::new(p, q, r).unwrap();
            prop_assert_eq!(re.sphere_l2_norm(), e.sphere_l2_norm());
        }
    }

    #[test]
    fn weyl_words_stay_gaussian_and_linear(
        word in prop::collection::vec((0usize..2, 0usize..2), 1..=10),
        lam in prop::sample::select(vec![(1i64, 1i64), (-1, 1), (2, 1), (1, 3)]),
        a in (0u8..3, 0u8..3, 0u8..3, 0u8..3),
    ) {
        let lambda = rat(lam.0, lam.1);
        let one = cx(int(1), int(0));
        let f = GaussianPolynomial::monomial(2, &lambda, Monomial::new([a.0, a.1, 0, 0], [a.2, 0, 0, 0]), one.clone()).unwrap();
        let g = GaussianPolynomial::monomial(2, &lambda, Monomial::new([0, a.3, 0, 0], [1, a.0, 0, 0]), cx(rat(2, 3), int(-1))).unwrap();
        let apply = |h: &GaussianPolynomial<ExactComplex>| {
            let mut h = h.clone();
            for &(kind, j) in word.iter().rev() {
                h = if kind == 0 { apply_w(j, &lambda, &h) } else { apply_w_plus(j, &lambda, &h) }.unwrap();
            }
            h
        };
        let (af, ag) = (apply(&f), apply(&g));
        prop_assert_eq!(af.scale(), f.scale());
        prop_assert_eq!(apply(&f.add(&g).unwrap()), af.add(&ag).unwrap());
    }

    #[test]
    fn tau_orderings_agree_on_harmonic_symbols(n in 1usize..=3, p in 0usize..=3, q in 0usize..=3, k in 0usize..=4, neg in any::<bool>(), pick in 0usize..16) {
        prop_assume!(p + q <= 4);
        let b = harmonic_basis(n, p, q);
        prop_assume!(!b.is_empty());
        let e = &b.elements[pick % b.len()];
        let lambda = int(if neg { -1 } else { 1 });
        let f = phi_gaussian::<ExactComplex>(k, n - 1, n, &lambda).unwrap();
        prop_assert_eq!(apply_tau(e.poly(), &lambda, &f).unwrap(), apply_tau_prime(e.poly(), &lambda, &f).unwrap());
    }

    #[test]
    fn commutator_is_half_lambda(
        alpha in prop::collection::vec(0u8..4, 3), beta in prop::collection::vec(0u8..4, 3), n in 1usize..=3,
        lam in prop::sample::select(vec![(1i64, 1i64), (-1, 1), (2, 1), (-2, 1), (1, 3)]),
        num in -9i64..9, den in 1i64..7,
    ) {
        let lambda = rat(lam.0, lam.1);
        let mut a = [0u8; 4];
        let mut b = [0u8; 4];
        a[..n].copy_from_slice(&alpha[..n]);
        b[..n].copy_from_slice(&beta[..n]);
        let f = GaussianPolynomial::monomial(n, &lambda, Monomial::new(a, b), cx(rat(num, den), rat(1, den))).unwrap();
        for j in 0..n {
            let r = commutator_check(j, &lambda, &f).unwrap();
            prop_assert!(r.is_zero(), "j = {j}: {:?}", r);
        }
    }

    #[test]
    fn tau_is_unitarily_equivariant(n in 1usize..=3, p in 0usize..=2, q in 0usize..=2, k in 0usize..=3, perm in 0usize..3, ph in prop::collection::vec(0usize..6, 3), pick in 0usize..8) {
        let b = harmonic_basis(n, p, q);
        prop_assume!(!b.is_empty());
        let e = &b.elements[pick % b.len()];
        let sigma = exact_unitary(n, perm, &ph);
        let lambda = int(1);
        let phi = phi_gaussian::<ExactComplex>(k, n - 1, n, &lambda).unwrap();
        let rotated_symbol = rotate_polynomial(&sigma, e.poly(), 0.0).unwrap();
        let lhs = apply_tau(&rotated_symbol, &lambda, &phi).unwrap();
        let image = apply_tau(e.poly(), &lambda, &phi).unwrap();
        let rhs = GaussianPolynomial::new(image.scale().clone(), rotate_polynomial(&sigma, image.poly(), 0.0).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn harmonic_ladder_residual_is_the_zero_polynomial(n in 1usize..=3, p in 0usize..=3, q in 0usize..=3, k in 0usize..=6, neg in any::<bool>(), pick in 0usize..16) {
        prop_assume!(p + q <= 4);
        let b = harmonic_basis(n, p, q);
        prop_assume!(!b.is_empty());
        let r = verify_harmonic_ladder(&b.elements[pick % b.len()], k, if neg { -1 } else { 1 }, LadderConvention::Consistent).unwrap();
        prop_assert!(r.passed() && r.residual_terms.is_empty(), "{:?}", r);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, ..ProptestConfig::default() })]

    #[test]
    fn sphere_coefficients_are_linear_and_reproduce_type_functions(
        n in 1usize..=2, p in 0usize..=2, q in 0usize..=2, pick in 0usize..8,
        a in (-2.0..2.0f64, -2.0..2.0f64), rho in 0.2f64..2.5,
    ) {
        let b = harmonic_basis(n, p, q);
        prop_assume!(!b.is_empty());
        let j = pick % b.len();
        let yj = b.elements[j].to_c64();
        let rule = SphereRule::for_degree(n, 2 * (p + q) + 2).unwrap();
        // planted a~(rho) Y_j(omega) with a~(rho) = rho^{p+q} e^{-rho^2/2}
        let planted = |z: &[Complex64]| yj.eval(z) * (-z.iter().map(|v| v.norm_sqr()).sum::<f64>() / 2.0).exp();
        let other = |z: &[Complex64]| c(1.0, 0.5) * z[0].conj().powu(q as u32) * z[n - 1].powu(p as u32);
        let got = sph_coefficients(&planted, &b, &[rho], &rule).unwrap();
        let want = rho.powi((p + q) as i32) * (-rho * rho / 2.0).exp();
        for (i, v) in got[0].iter().enumerate() {
            let t = if i == j { want } else { 0.0 };
            prop_assert!((v - c(t, 0.0)).norm() <= 1e-8 * want.max(1e-3), "{i}: {v} vs {t}");
        }
        let s = c(a.0, a.1);
        let mixed = |z: &[Complex64]| planted(z) * s + other(z);
        let lhs = sph_coefficients(&mixed, &b, &[rho], &rule).unwrap();
        let rhs_other = sph_coefficients(&other, &b, &[rho], &rule).unwrap();
        for i in 0..b.len() {
            let rhs = got[0][i] * s + rhs_other[0][i];
            prop_assert!((lhs[0][i] - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
        }
    }

    #[test]
    fn radial_orthogonality(j in 0usize..=8, k in 0usize..=8, gamma in 1usize..=6) {
        let rule = RadialRule::default();
        let v = rule.integrate(gamma as f64, |r| phi_radial(j, gamma as f64 - 1.0, r) * phi_radial(k, gamma as f64 - 1.0, r));
        let norm = phi_norm_sq_f64(k.max(j), gamma);
        if j == k {
            prop_assert!(rel(v, norm) <= 1e-10, "{v} vs {norm}");
        } else {
            prop_assert!(v.abs() <= 1e-10 * norm);
        }
    }

    #[test]
    fn twisted_convolution_is_bilinear(a in (-2.0..2.0f64, -2.0..2.0f64), b in (-2.0..2.0f64, -2.0..2.0f64), z in point(1)) {
        let spec = GridSpec::new(1, 12.0, 96).unwrap();
        let f1 = GridFunction::from_field(spec, &PhiField { k: 1, n: 1 }, "f1").unwrap();
        let f2 = GridFunction::from_field(spec, &TypeField::radial(RadialProfile::gaussian(1.0, 0.3), 1), "f2").unwrap();
        let g = GridFunction::from_field(spec, &PhiField { k: 0, n: 1 }, "g").unwrap();
        let (sa, sb) = (c(a.0, a.1), c(b.0, b.1));
        let mix = GridFunction::new(spec, f1.samples.iter().zip(&f2.samples).map(|(x, y)| x * sa + y * sb).collect(), "mix").unwrap();
        let pts = vec![z.iter().map(|v| v * 0.5).collect::<Vec<_>>()];
        let lhs = convolve_grids(&mix, &g, 1.0, &pts).unwrap()[0];
        let rhs = convolve_grids(&f1, &g, 1.0, &pts).unwrap()[0] * sa + convolve_grids(&f2, &g, 1.0, &pts).unwrap()[0] * sb;
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
    }

    #[test]
    fn radial_tsm_at_origin_is_real(n in 1usize..=2, a in 0.1f64..1.5, r in 0.1f64..3.0, k in 0usize..4) {
        let f = TypeField::radial(RadialProfile::gaussian(1.0, a), n);
        let v = twisted_spherical_mean(&f, &SphereMeasureSpec::resolved(n, r, 0.0), &vec![c(0.0, 0.0); n]).unwrap();
        prop_assert!(v.im.abs() <= 1e-10);
        let g = PhiField { k, n };
        let v = twisted_spherical_mean(&g, &SphereMeasureSpec::resolved(n, r, 0.0), &vec![c(0.0, 0.0); n]).unwrap();
        prop_assert!(v.im.abs() <= 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 6, ..ProptestConfig::default() })]

    #[test]
    fn expansion_entries_are_harmonic_and_indexed_by_p_at_most_k(k in 0usize..=3, p in 0usize..=2, q in 0usize..=2, a in 0.2f64..0.8) {
        let b = harmonic_basis(1, p, q);
        prop_assume!(!b.is_empty());
        let f = TypeField::new(RadialProfile::gaussian(1.0, a), &b.elements[0]);
        let exp = extract_expansion(&f, k, &ExpansionOptions::default(), &BasisCache::default()).unwrap();
        for e in &exp.entries {
            prop_assert!(e.p <= k);
            prop_assert!(e.harmonic_defect() <= 1e-8);
        }
    }
}

#[test]
fn orthogonality_matrix_at_origin() {
    let grid = GridSpec::default_for(1).unwrap();
    let z0 = vec![vec![c(0.0, 0.0)]];
    let ks: Vec<usize> = (0..6).collect();
    for j in 0..6 {
        let row = twisted_core::spectral::spectral_projections(&PhiField { k: j, n: 1 }, &ks, &grid, &z0).unwrap();
        for k in 0..6 {
            let m = row[k][0] / (2.0 * std::f64::consts::PI * eval_phi(k, 1, &z0[0]));
            let want = if j == k { 1.0 } else { 0.0 };
            assert!((m - c(want, 0.0)).norm() <= 1e-5, "M[{j}][{k}] = {m}");
        }
    }
}

#[test]
fn orthogonality_residual_drops_under_refinement() {
    // coarse grids, so the trapezoid error is above round-off at both sizes
    let z = vec![vec![c(0.4, -0.3)], vec![c(1.0, 0.7)]];
    let residual = |steps: usize| {
        let grid = GridSpec::new(1, 12.0, steps).unwrap();
        let mut worst = 0.0f64;
        for j in 0..4 {
            let q = twisted_core::spectral::spectral_projections(&PhiField { k: j, n: 1 }, &[0, 1, 2, 3], &grid, &z).unwrap();
            for (k, row) in q.iter().enumerate() {
                for (zz, v) in z.iter().zip(row) {
                    let want = if j == k { 2.0 * std::f64::consts::PI * eval_phi(k, 1, zz) } else { 0.0 };
                    worst = worst.max((v - want).norm());
                }
            }
        }
        worst
    };
    let (coarse, fine) = (residual(16), residual(32));
    assert!(fine * 4.0 <= coarse, "{coarse:e} -> {fine:e}");
}

#[test]
fn reconstruction_residual_is_monotone() {
    let grid = GridSpec::default_for(1).unwrap();
    let probes = vec![vec![c(0.2, 0.1)]];
    for entry in corpus(3).into_iter().filter(|e| e.n == 1).take(2) {
        let r = special_hermite_reconstruct(&entry.field(), 6, &grid, &probes, true).unwrap();
        let l2 = r.l2_residuals.unwrap();
        for w in l2.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-9) + 1e-12, "{}: {l2:?}", entry.name);
        }
    }
}

#[test]
fn admissible_set_boundary() {
    for (a, ok) in [(cx(int(0), int(0)), false), (cx(int(-3), int(0)), false), (cx(int(1), int(0)), false), (cx(rat(-5, 2), int(0)), true), (cx(int(-3), rat(1, 9)), true)] {
        assert_eq!(GeneralizedLaguerreSpec::new(a.clone(), 0, 10).is_ok(), ok, "{a}");
    }
    let _ = BigRational::one();
}
