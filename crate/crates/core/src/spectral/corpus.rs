use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exact::{int, ExactComplex, Scalar};
use crate::harmonics::BigradedPolynomial;
use crate::laguerre::{phi_norm_sq_f64, phi_radial};
use crate::poly::{Monomial, Poly, MAX_DIM};
use crate::twisted::{Field, RadialProfile, TypeField};

/// One planted component `c a(|z|) P(z)` with `P` harmonic.
#[derive(Clone, Debug)]
pub struct CorpusComponent {
    pub profile: RadialProfile,
    pub harmonic: BigradedPolynomial,
    pub coefficient: Complex64,
}

impl CorpusComponent {
    /// Closed-form `(c a P) x phi_k` at `z`.
    pub fn projection(&self, k: usize, z: &[Complex64]) -> Complex64 {
        let (n, p, q) = (self.harmonic.n(), self.harmonic.p(), self.harmonic.q());
        if k < p {
            return Complex64::new(0.0, 0.0);
        }
        let gamma = n + p + q;
        let c = (2.0 * PI).powi(n as i32) * self.profile.inner(k - p, gamma) / phi_norm_sq_f64(k - p, gamma);
        let r = z.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        self.coefficient * self.harmonic.eval(z) * (c * phi_radial(k - p, (gamma - 1) as f64, r))
    }
}

/// A planted mixture of type functions.
#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub name: String,
    pub n: usize,
    pub seed: u64,
    pub components: Vec<CorpusComponent>,
}

impl CorpusEntry {
    pub fn field(&self) -> CorpusField {
        CorpusField {
            n: self.n,
            parts: self
                .components
                .iter()
                .map(|c| TypeField { profile: c.profile.clone(), poly: c.harmonic.to_c64().scale(&c.coefficient) })
                .collect(),
        }
    }

    /// Planted `Q_k(z)`, summed over components.
    pub fn projection(&self, k: usize, z: &[Complex64]) -> Complex64 {
        self.components.iter().map(|c| c.projection(k, z)).sum()
    }

    /// Bidegrees present.
    pub fn types(&self) -> Vec<(usize, usize)> {
        let mut t: Vec<_> = self.components.iter().map(|c| (c.harmonic.p(), c.harmonic.q())).collect();
        t.sort();
        t.dedup();
        t
    }
}

/// Owned sum of type functions.
#[derive(Clone, Debug)]
pub struct CorpusField {
    pub n: usize,
    pub parts: Vec<TypeField>,
}

impl Field for CorpusField {
    fn dim(&self) -> usize {
        self.n
    }
    fn eval(&self, z: &[Complex64]) -> Complex64 {
        self.parts.iter().map(|f| f.eval(z)).sum()
    }
}

fn mono(n: usize, terms: &[(&[u8], &[u8], i64)]) -> BigradedPolynomial {
    let mut poly = Poly::zero(n);
    let (mut p, mut q) = (0, 0);
    for (a, b, c) in terms {
        let mut alpha = [0u8; MAX_DIM];
        let mut beta = [0u8; MAX_DIM];
        alpha[..n].copy_from_slice(a);
        beta[..n].copy_from_slice(b);
        let m = Monomial::new(alpha, beta);
        p = m.holomorphic_degree();
        q = m.antiholomorphic_degree();
        poly.add_term(m, ExactComplex::from_rational(&int(*c)));
    }
    let b = BigradedPolynomial::new(p, q, poly).expect("homogeneous by construction");
    debug_assert!(b.is_harmonic());
    b
}

/// Ten planted mixtures, five on `C` and five on `C^2`. Component scalars
/// are drawn from `seed`.
pub fn corpus(seed: u64) -> Vec<CorpusEntry> {
    let g = RadialProfile::gaussian;
    let one1 = mono(1, &[(&[0], &[0], 1)]);
    let one2 = mono(2, &[(&[0, 0], &[0, 0], 1)]);
    let specs: Vec<(&str, usize, Vec<(RadialProfile, BigradedPolynomial)>)> = vec![
        ("gaussian", 1, vec![(g(1.0, 0.5), one1.clone())]),
        ("z", 1, vec![(g(1.0, 0.3), mono(1, &[(&[1], &[0], 1)]))]),
        ("zbar2+radial", 1, vec![(g(0.8, 0.35), mono(1, &[(&[0], &[2], 1)])), (g(1.0, 0.5), one1.clone())]),
        ("phi2+z", 1, vec![(RadialProfile::phi(2, 0), one1.clone()), (g(0.5, 0.3), mono(1, &[(&[1], &[0], 1)]))]),
        ("z3+zbar", 1, vec![(g(1.0, 0.4), mono(1, &[(&[3], &[0], 1)])), (g(0.7, 0.3), mono(1, &[(&[0], &[1], 1)]))]),
        ("gaussian", 2, vec![(g(1.0, 0.3), one2.clone())]),
        ("phi0*z1", 2, vec![(RadialProfile::phi(0, 2), mono(2, &[(&[1, 0], &[0, 0], 1)]))]),
        ("z1*zbar2+radial", 2, vec![(g(1.0, 0.3), mono(2, &[(&[1, 0], &[0, 1], 1)])), (g(0.5, 0.4), one2.clone())]),
        (
            "h11+zbar2",
            2,
            vec![
                (g(1.0, 0.35), mono(2, &[(&[1, 0], &[1, 0], 1), (&[0, 1], &[0, 1], -1)])),
                (g(1.0, 0.3), mono(2, &[(&[0, 0], &[0, 1], 1)])),
            ],
        ),
        (
            "z1^2+zbar1+phi1",
            2,
            vec![
                (g(1.0, 0.3), mono(2, &[(&[2, 0], &[0, 0], 1)])),
                (g(0.6, 0.4), mono(2, &[(&[0, 0], &[1, 0], 1)])),
                (RadialProfile::phi(1, 1), one2),
            ],
        ),
    ];
    specs
        .into_iter()
        .enumerate()
        .map(|(i, (name, n, comps))| {
            let s = seed.wrapping_add(i as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let components = comps
                .into_iter()
                .map(|(profile, harmonic)| {
                    let m: f64 = rng.gen_range(0.5..1.5);
                    let t: f64 = rng.gen_range(0.0..2.0 * PI);
                    CorpusComponent { profile, harmonic, coefficient: Complex64::from_polar(m, t) }
                })
                .collect();
            CorpusEntry { name: format!("n{n}/{name}"), n, seed: s, components }
        })
        .collect()
}
