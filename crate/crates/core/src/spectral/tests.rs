use super::*;
use crate::exact::{cx, int};
use crate::harmonics::BigradedPolynomial;
use crate::laguerre::isolate_real_roots;
use crate::laguerre::laguerre_coeffs_int;
use crate::poly::Monomial;
use crate::twisted::{FnField, RadialProfile, TypeField};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn z1(n: usize) -> BigradedPolynomial {
    BigradedPolynomial::monomial(n, Monomial::z(0), cx(int(1), int(0)))
}

fn probes1() -> Vec<Vec<Complex64>> {
    [(0.0, 0.0), (0.5, -0.3), (-1.0, 0.8), (1.2, 1.1), (0.2, -1.7)].iter().map(|&(a, b)| vec![c(a, b)]).collect()
}

fn probes2() -> Vec<Vec<Complex64>> {
    vec![vec![c(0.0, 0.0), c(0.0, 0.0)], vec![c(0.4, -0.2), c(0.7, 0.3)], vec![c(-0.9, 0.5), c(0.1, -1.0)]]
}

#[test]
fn projection_of_laguerre_functions() {
    let grid = GridSpec::default_for(1).unwrap();
    let q = spectral_projections(&PhiField { k: 2, n: 1 }, &[1, 2, 3], &grid, &probes1()).unwrap();
    for (z, v) in probes1().iter().zip(&q[1]) {
        assert!((v - c(2.0 * PI * eval_phi(2, 1, z), 0.0)).norm() < 1e-9);
    }
    assert!(q[0].iter().chain(&q[2]).all(|v| v.norm() < 1e-9));
    // single and batched routes agree
    let single = spectral_projection(&PhiField { k: 2, n: 1 }, 2, &grid, &probes1()).unwrap();
    for (a, b) in single.iter().zip(&q[1]) {
        assert!((a - b).norm() < 1e-12);
    }
}

#[test]
fn projection_of_planted_type_function() {
    let entry = &corpus(7)[1];
    let f = entry.field();
    let grid = GridSpec::default_for(1).unwrap();
    for k in 0..=3 {
        let q = spectral_projection(&f, k, &grid, &probes1()).unwrap();
        for (z, v) in probes1().iter().zip(&q) {
            assert!((v - entry.projection(k, z)).norm() < 1e-8, "k={k} z={z:?}");
        }
    }
}

#[test]
fn radial_function_has_only_the_radial_component() {
    let prof = RadialProfile::gaussian(1.0, 0.5);
    let f = TypeField::radial(prof.clone(), 1);
    let exp = extract_expansion(&f, 2, &ExpansionOptions::default(), &BasisCache::default()).unwrap();
    assert_eq!(exp.entries.len(), 1);
    let e = &exp.entries[0];
    assert_eq!((e.p, e.q), (0, 0));
    let want = 2.0 * PI * prof.inner(2, 1) / phi_norm_sq_f64(2, 1);
    let got = e.poly.eval(&[c(0.0, 0.0)]);
    assert!((got - c(want, 0.0)).norm() < 1e-10 * want.abs(), "{got} vs {want}");
}

#[test]
fn planted_type_function_gives_one_entry() {
    let f = TypeField::new(RadialProfile::phi(0, 2), &z1(2));
    let opts = ExpansionOptions { angular_degree: 4, ..Default::default() };
    let exp = extract_expansion(&f, 1, &opts, &BasisCache::default()).unwrap();
    let keys: Vec<_> = exp.entries.iter().map(|e| (e.p, e.q)).collect();
    assert_eq!(keys, vec![(1, 0)]);
    assert!(exp.entries[0].harmonic_defect() < 1e-12);
    // (2pi)^2 <phi_0^2, phi_0^2> / ||phi_0^2||^2 = (2pi)^2
    let v = exp.entries[0].poly.coefficient(&Monomial::z(0));
    assert!((v - c(4.0 * PI * PI, 0.0)).norm() < 1e-9 * 40.0);
}

#[test]
fn zero_function_expansion_is_empty() {
    let f = FnField::new(1, |_: &[Complex64]| c(0.0, 0.0));
    let exp = extract_expansion(&f, 3, &ExpansionOptions::default(), &BasisCache::default()).unwrap();
    assert!(exp.entries.is_empty());
    assert_eq!(exp.tail.value, Some(0.0));
}

#[test]
fn tail_bound_shape() {
    let q = |n: usize, k: usize, extra: usize| (0..=k).map(|p| tail_threshold(n, k, p) + extra).collect::<Vec<_>>();
    for n in 1..=2 {
        let k = 2;
        let mut last = f64::INFINITY;
        for extra in 0..20 {
            let b = tail_bound(k, n, 2.0, &q(n, k, extra), 1.0, "test").value.unwrap();
            assert!(b < last, "n={n} extra={extra}");
            last = b;
        }
        assert!(last < 1e-3);
        let small = tail_bound(k, n, 1.0, &q(n, k, 2), 1.0, "test").value.unwrap();
        let big = tail_bound(k, n, 2.0, &q(n, k, 2), 1.0, "test").value.unwrap();
        assert!(big > small);
        assert_eq!(tail_bound(k, n, 0.0, &q(n, k, 0), 1.0, "test").value, Some(0.0));
        let below: Vec<usize> = q(n, k, 0).iter().map(|v| v - 1).collect();
        let r = tail_bound(k, n, 2.0, &below, 1.0, "test");
        assert!(!r.claimed());
        assert_eq!(r.status, "not_in_asymptotic_regime");
    }
}

#[test]
fn expansion_matches_direct_projection_n1() {
    let grid = GridSpec::default_for(1).unwrap();
    let cache = BasisCache::default();
    for entry in corpus(11).iter().filter(|e| e.n == 1) {
        let f = entry.field();
        for k in [1, 3] {
            let exp = extract_expansion(&f, k, &ExpansionOptions::default(), &cache).unwrap();
            let direct = spectral_projection(&f, k, &grid, &probes1()).unwrap();
            let tail = exp.tail.value.unwrap();
            for (z, d) in probes1().iter().zip(&direct) {
                let e = evaluate_expansion(&exp, z).unwrap();
                assert!((e - d).norm() <= tail + 1e-4, "{} k={k}: {e} vs {d}", entry.name);
                assert!((e - entry.projection(k, z)).norm() < 1e-8, "{} k={k}", entry.name);
            }
            for e in &exp.entries {
                assert!(entry.types().contains(&(e.p, e.q)), "{}: spurious ({}, {})", entry.name, e.p, e.q);
            }
        }
    }
}

#[test]
fn expansion_matches_direct_projection_n2() {
    let entry = &corpus(11)[7];
    assert_eq!(entry.n, 2);
    let f = entry.field();
    let grid = GridSpec::default_for(2).unwrap();
    let exp = extract_expansion(&f, 2, &ExpansionOptions::default(), &BasisCache::default()).unwrap();
    let direct = spectral_projection(&f, 2, &grid, &probes2()).unwrap();
    for (z, d) in probes2().iter().zip(&direct) {
        let e = evaluate_expansion(&exp, z).unwrap();
        assert!((e - d).norm() <= exp.tail.value.unwrap() + 1e-4, "{e} vs {d}");
        assert!((e - entry.projection(2, z)).norm() < 1e-8);
    }
}

#[test]
fn evaluation_outside_the_ball_is_refused() {
    let f = TypeField::radial(RadialProfile::gaussian(1.0, 0.5), 1);
    let exp = extract_expansion(&f, 0, &ExpansionOptions { radius: 1.0, ..Default::default() }, &BasisCache::default()).unwrap();
    assert!(matches!(evaluate_expansion(&exp, &[c(1.0, 1.0)]), Err(Error::OutOfBall { .. })));
    assert!(evaluate_expansion(&exp, &[c(0.6, 0.6)]).is_ok());
}

#[test]
fn origin_sees_only_the_radial_term() {
    let entry = &corpus(3)[2];
    let f = entry.field();
    let exp = extract_expansion(&f, 2, &ExpansionOptions::default(), &BasisCache::default()).unwrap();
    let z = [c(0.0, 0.0)];
    let p00 = exp.entry(0, 0).unwrap().poly.eval(&z) * phi_radial(2, 0.0, 0.0);
    assert!((evaluate_expansion(&exp, &z).unwrap() - p00).norm() < 1e-15);
}

#[test]
fn parseval_layering_n1() {
    let entry = &corpus(5)[2];
    let f = entry.field();
    let norms = projection_norm_sq(&f, &[2]).unwrap();
    let opts = ExpansionOptions { projection_norm: Some(norms[0].sqrt()), ..Default::default() };
    let exp = extract_expansion(&f, 2, &opts, &BasisCache::default()).unwrap();
    let layered = exp.layered_norm_sq().unwrap();
    assert!((layered - norms[0]).abs() <= 1e-3 * norms[0], "{layered} vs {}", norms[0]);
    assert_eq!(exp.tail.norm_source, "projection_l2");
    assert!(projection_norm_sq(&corpus(5)[6].field(), &[0]).is_err());
}

#[test]
fn reconstruction_of_laguerre_function_is_exact_from_its_index() {
    let grid = GridSpec::default_for(1).unwrap();
    let r = special_hermite_reconstruct(&PhiField { k: 3, n: 1 }, 5, &grid, &probes1(), false).unwrap();
    assert!(r.probe_residuals[2] > 0.1);
    assert!(r.probe_residuals[3..].iter().all(|v| *v < 1e-9), "{:?}", r.probe_residuals);
}

#[test]
fn reconstruction_of_gaussian() {
    let grid = GridSpec::default_for(1).unwrap();
    let f = TypeField::radial(RadialProfile::gaussian(1.0, 0.5), 1);
    let r = special_hermite_reconstruct(&f, 12, &grid, &probes1(), true).unwrap();
    assert!(r.probe_residuals[12] < 1e-4, "{:?}", r.probe_residuals);
    let l2 = r.l2_residuals.unwrap();
    assert!(l2.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9) + 1e-12), "{l2:?}");
    let zero = FnField::new(1, |_: &[Complex64]| c(0.0, 0.0));
    let r0 = special_hermite_reconstruct(&zero, 3, &grid, &probes1(), false).unwrap();
    assert!(r0.partial_sum.iter().all(|v| *v == c(0.0, 0.0)));
}

#[test]
fn projection_is_a_special_hermite_eigenfunction() {
    let entry = &corpus(2)[4];
    let grid = GridSpec::default_for(1).unwrap();
    let chk = fd_eigen_check(&entry.field(), 2, &grid, &[c(0.6, -0.4)], &[0.2, 0.1, 0.05]).unwrap();
    assert!(chk.residuals[2] < 1e-3 * chk.value.norm().max(1.0), "{:?}", chk.residuals);
    // the component of type (0, 1) is rotated, so A alone misses it
    assert!(chk.plain_residuals.iter().all(|r| *r > 1e-2), "{:?}", chk.plain_residuals);
    for r in &chk.ratios {
        assert!((r - 4.0).abs() < 0.3, "{:?}", chk.ratios);
    }
    let radial = fd_eigen_check(&corpus(2)[0].field(), 2, &grid, &[c(0.6, -0.4)], &[0.2, 0.1]).unwrap();
    assert!(radial.plain_residuals[1] < 0.3 * radial.plain_residuals[0]);
}

#[test]
fn sphere_experiment_recovers_laguerre_coefficient() {
    let f = RadialProfile::phi(2, 1);
    let cfg = SphereConfig::new(z1(2), vec![1.5], 4, 9);
    let rep = sphere_injectivity_experiment(&f, &cfg).unwrap();
    let norm = crate::exact::sphere_area(2) * phi_norm_sq_f64(2, 2);
    for cf in &rep.coefficients {
        let want = if cf.k == 2 { norm } else { 0.0 };
        let got = cf.recovered.unwrap();
        assert!((got - c(want, 0.0)).norm() <= 1e-4 * norm, "k={} {got} vs {want}", cf.k);
        assert!(cf.error.unwrap() <= 1e-4);
    }
    assert_eq!(rep.verdict, "coefficients recovered");
}

#[test]
fn sphere_experiment_zero_function() {
    let cfg = SphereConfig::new(z1(1), vec![1.0], 3, 1);
    let rep = sphere_injectivity_experiment(&RadialProfile::zero(), &cfg).unwrap();
    assert_eq!(rep.verdict, "all coefficients pinned to zero");
    assert!(rep.coefficients.iter().all(|c| c.recovered.unwrap().norm() < 1e-8));
}

#[test]
fn sphere_experiment_flags_radius_on_a_zero() {
    // n = 1, weight z: gamma = 2, coefficient k sees phi_k^1(R)
    let root = isolate_real_roots(&laguerre_coeffs_int(2, 1), 0.0, 20.0, 1e-14)[0].midpoint();
    let r0 = (2.0 * root).sqrt();
    let f = RadialProfile::gaussian(1.0, 0.4);
    let cfg = SphereConfig::new(z1(1), vec![r0, 1.1], 4, 3);
    let rep = sphere_injectivity_experiment(&f, &cfg).unwrap();
    let k2 = &rep.coefficients[2];
    assert!(!k2.per_radius[0].pinned);
    assert!(k2.per_radius[1].pinned);
    assert_eq!(k2.radius_used, Some(1.1));
    let k1 = &rep.coefficients[1];
    assert!(k1.per_radius[0].pinned);
}

#[test]
fn sphere_experiment_refuses_slow_decay() {
    let f = RadialProfile::gaussian(1.0, 0.125);
    let cfg = SphereConfig::new(z1(1), vec![1.0], 3, 1);
    assert!(matches!(sphere_injectivity_experiment(&f, &cfg), Err(Error::Decay(_))));
    assert!(decay_hypothesis(&RadialProfile::phi(2, 0), 3).passed);
}

#[test]
fn cone_experiment_planted_and_degenerate() {
    let comp = CorpusComponent { profile: RadialProfile::gaussian(1.0, 0.3), harmonic: z1(2), coefficient: c(0.8, -0.3) };
    let entry = CorpusEntry { name: "z1".into(), n: 2, seed: 0, components: vec![comp.clone()] };
    let f = entry.field();
    let dirs = vec![vec![c(0.6, 0.0), c(0.0, 0.8)], vec![c(0.0, 1.0), c(0.0, 0.0)]];
    let cfg = ConeConfig::new(dirs.clone(), 2, 4).unwrap();
    let rep = cone_injectivity_experiment(&f, &cfg).unwrap();
    assert_eq!(rep.verdict, "injective for this f-class");
    for fit in &rep.fits {
        assert!(fit.frequency_coupling < 1e-12, "{fit:?}");
    }
    for k in 1..=2 {
        for (di, d) in rep.directions.iter().enumerate() {
            let truth = comp.projection(k, d) / phi_radial(k - 1, 2.0, 1.0);
            let got = rep.coefficient(k, 1, 0, di).unwrap().value;
            assert!((got - truth).norm() <= 1e-3 * truth.norm(), "k={k} dir={di}: {got} vs {truth}");
            for cf in rep.coefficients.iter().filter(|c| c.k == k && c.direction == di && (c.s, c.t) != (1, 0)) {
                assert!(cf.forced_zero, "{cf:?}");
            }
        }
    }
    assert!(rep.binomials.iter().all(|b| b.rel_error < 1e-3), "{:?}", rep.binomials);
    assert!(!rep.binomials.is_empty());

    // cone inside {z1 = 0}
    let cfg = ConeConfig::new(vec![vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(0.6, 0.8)]], 2, 4).unwrap();
    let rep = cone_injectivity_experiment(&f, &cfg).unwrap();
    assert_eq!(rep.verdict, "non-injective configuration detected");
    assert!(rep.f_sup > 0.1);
}
