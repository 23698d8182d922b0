//! Input functions: planted type-function mixtures, corpus entries and
//! sampled grid files.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use num_rational::BigRational;
use serde::Deserialize;

use twisted_core::exact::{cx, int};
use twisted_core::harmonics::{harmonic_basis, BigradedPolynomial, HarmonicBasis};
use twisted_core::poly::{Monomial, Poly, MAX_DIM};
use twisted_core::spectral::{corpus, CorpusComponent, CorpusEntry};
use twisted_core::twisted::{Field, GridFunction, RadialProfile};

use crate::Failure;

#[derive(Clone, Debug, Default, Deserialize)]
pub struct FieldSpec {
    pub n: Option<usize>,
    /// Index into the built-in corpus (drawn with `--seed`).
    pub corpus: Option<usize>,
    pub grid_file: Option<PathBuf>,
    #[serde(default)]
    pub components: Vec<ComponentSpec>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct ComponentSpec {
    pub profile: ProfileSpec,
    pub harmonic: Option<HarmonicSpec>,
    /// `[re, im]`, default `[1, 0]`.
    pub coefficient: Option<[f64; 2]>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileSpec {
    /// `c e^{-a r^2}`
    Gaussian { c: f64, a: f64 },
    /// `phi_k^{order}(r)`
    Phi { k: usize, order: usize },
    Zero,
}

impl ProfileSpec {
    pub fn build(&self) -> Result<RadialProfile, Failure> {
        match *self {
            ProfileSpec::Gaussian { c, a } if a > 0.0 && c.is_finite() => Ok(RadialProfile::gaussian(c, a)),
            ProfileSpec::Gaussian { .. } => Err(Failure::Usage("gaussian profile needs a > 0 and finite c".into())),
            ProfileSpec::Phi { k, order } => Ok(RadialProfile::phi(k, order)),
            ProfileSpec::Zero => Ok(RadialProfile::zero()),
        }
    }
}

/// A bigraded harmonic: element `index` of the built-in basis of `H_{p,q}`,
/// element `index` of a basis JSON file, or an explicit list of monomials.
#[derive(Clone, Debug, Default, Deserialize)]
pub struct HarmonicSpec {
    /// `[p, q, index]`
    pub basis: Option<[usize; 3]>,
    pub basis_file: Option<PathBuf>,
    pub index: Option<usize>,
    pub monomials: Option<Vec<MonomialSpec>>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct MonomialSpec {
    pub alpha: Vec<u8>,
    pub beta: Vec<u8>,
    #[serde(default = "one")]
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

fn one() -> f64 {
    1.0
}

fn exact(v: f64) -> Result<BigRational, Failure> {
    BigRational::from_float(v).ok_or_else(|| Failure::Usage(format!("coefficient {v} is not finite")))
}

impl HarmonicSpec {
    pub fn build(&self, n: usize) -> Result<BigradedPolynomial, Failure> {
        if let Some([p, q, j]) = self.basis {
            let b = harmonic_basis(n, p, q);
            return pick(&b, j, &format!("H_{{{p},{q}}} on C^{n}"));
        }
        if let Some(path) = &self.basis_file {
            let b = read_basis(path)?;
            if b.n != n {
                return Err(Failure::Usage(format!("{} is a basis on C^{}, expected C^{n}", path.display(), b.n)));
            }
            return pick(&b, self.index.unwrap_or(0), &path.display().to_string());
        }
        if let Some(monos) = &self.monomials {
            let mut poly = Poly::zero(n);
            let (mut p, mut q) = (None, None);
            for m in monos {
                if m.alpha.len() != n || m.beta.len() != n {
                    return Err(Failure::Usage(format!("monomial exponents must have length {n}")));
                }
                let mut alpha = [0u8; MAX_DIM];
                let mut beta = [0u8; MAX_DIM];
                alpha[..n].copy_from_slice(&m.alpha);
                beta[..n].copy_from_slice(&m.beta);
                let mono = Monomial::new(alpha, beta);
                let (mp, mq) = (mono.holomorphic_degree(), mono.antiholomorphic_degree());
                if p.is_some_and(|v| v != mp) || q.is_some_and(|v| v != mq) {
                    return Err(Failure::Usage("monomials must share one bidegree".into()));
                }
                p = Some(mp);
                q = Some(mq);
                poly.add_term(mono, cx(exact(m.re)?, exact(m.im)?));
            }
            let b = BigradedPolynomial::new(p.unwrap_or(0), q.unwrap_or(0), poly).map_err(|e| Failure::Usage(e.to_string()))?;
            if !b.is_harmonic() {
                return Err(Failure::Usage("the given polynomial is not harmonic".into()));
            }
            return Ok(b);
        }
        Err(Failure::Usage("harmonic needs one of basis, basis_file or monomials".into()))
    }
}

fn pick(b: &HarmonicBasis, j: usize, what: &str) -> Result<BigradedPolynomial, Failure> {
    b.elements.get(j).cloned().ok_or_else(|| Failure::Usage(format!("{what} has {} basis elements, index {j} requested", b.len())))
}

pub fn read_basis(path: &Path) -> Result<HarmonicBasis, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    let v: serde_json::Value = serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    HarmonicBasis::from_json(&v).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn constant(n: usize) -> BigradedPolynomial {
    BigradedPolynomial::monomial(n, Monomial::ONE, cx(int(1), int(0)))
}

/// A resolved input function.
pub enum Input {
    /// Closed form with known projections.
    Planted(CorpusEntry),
    Grid(GridFunction),
}

impl Input {
    pub fn n(&self) -> usize {
        match self {
            Input::Planted(e) => e.n,
            Input::Grid(g) => g.spec.n,
        }
    }

    pub fn name(&self) -> String {
        match self {
            Input::Planted(e) => e.name.clone(),
            Input::Grid(g) => format!("grid:{}", g.tag),
        }
    }

    pub fn field(&self) -> Box<dyn Field + '_> {
        match self {
            Input::Planted(e) => Box::new(e.field()),
            Input::Grid(g) => Box::new(g.clone()),
        }
    }

    /// Closed-form `f x phi_k` when known.
    pub fn planted_projection(&self, k: usize, z: &[Complex64]) -> Option<Complex64> {
        match self {
            Input::Planted(e) => Some(e.projection(k, z)),
            Input::Grid(_) => None,
        }
    }
}

impl FieldSpec {
    pub fn resolve(&self, seed: u64) -> Result<Input, Failure> {
        if let Some(i) = self.corpus {
            let all = corpus(seed);
            let len = all.len();
            return all.into_iter().nth(i).map(Input::Planted).ok_or_else(|| Failure::Usage(format!("corpus has {len} entries, index {i} requested")));
        }
        if let Some(path) = &self.grid_file {
            let mut file = std::fs::File::open(path).map_err(|e| Failure::Usage(format!("cannot open {}: {e}", path.display())))?;
            let g = GridFunction::read_from(&mut file).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            return Ok(Input::Grid(g));
        }
        let n = self.n.ok_or_else(|| Failure::Usage("field needs n (or corpus / grid_file)".into()))?;
        if !(1..=2).contains(&n) {
            return Err(Failure::Usage(format!("numeric fields live on C or C^2, got n = {n}")));
        }
        if self.components.is_empty() {
            return Err(Failure::Usage("field has no components".into()));
        }
        let mut components = Vec::new();
        let mut tags = Vec::new();
        for c in &self.components {
            let profile = c.profile.build()?;
            let harmonic = match &c.harmonic {
                Some(h) => h.build(n)?,
                None => constant(n),
            };
            let [re, im] = c.coefficient.unwrap_or([1.0, 0.0]);
            tags.push(format!("{}*H{},{}", profile.tag(), harmonic.p(), harmonic.q()));
            components.push(CorpusComponent { profile, harmonic, coefficient: Complex64::new(re, im) });
        }
        Ok(Input::Planted(CorpusEntry { name: tags.join(" + "), n, seed, components }))
    }

    /// `corpus:3`, `gaussian:c=1,a=0.5,n=1`, `phi:k=2,order=0`, `zero:n=2`,
    /// `grid:PATH` or `toml:PATH` (a file with a `[field]` table). `harmonic`
    /// (`p,q,index`) multiplies a single shorthand profile.
    pub fn from_shorthand(s: &str, harmonic: Option<&str>) -> Result<FieldSpec, Failure> {
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let kv = |key: &str| -> Option<&str> {
            rest.split(',').filter_map(|p| p.split_once('=')).find(|(k, _)| k.trim() == key).map(|(_, v)| v.trim())
        };
        let num = |key: &str, default: Option<f64>| -> Result<f64, Failure> {
            match kv(key) {
                Some(v) => v.parse().map_err(|_| Failure::Usage(format!("--f {s}: {key} = {v} is not a number"))),
                None => default.ok_or_else(|| Failure::Usage(format!("--f {s}: missing {key}"))),
            }
        };
        let n = num("n", Some(1.0))? as usize;
        let profile = match kind {
            "corpus" => {
                let i = rest.parse().map_err(|_| Failure::Usage(format!("--f {s}: expected corpus:<index>")))?;
                return Ok(FieldSpec { corpus: Some(i), ..Default::default() });
            }
            "grid" => return Ok(FieldSpec { grid_file: Some(PathBuf::from(rest)), ..Default::default() }),
            "toml" => {
                #[derive(Deserialize)]
                struct Wrapper {
                    field: FieldSpec,
                }
                let text = std::fs::read_to_string(rest).map_err(|e| Failure::Usage(format!("cannot read {rest}: {e}")))?;
                let w: Wrapper = toml::from_str(&text).map_err(|e| Failure::Usage(format!("{rest}: {e}")))?;
                return Ok(w.field);
            }
            "gaussian" => ProfileSpec::Gaussian { c: num("c", Some(1.0))?, a: num("a", None)? },
            "phi" => ProfileSpec::Phi { k: num("k", None)? as usize, order: num("order", Some(n as f64 - 1.0))? as usize },
            "zero" => ProfileSpec::Zero,
            other => return Err(Failure::Usage(format!("unknown field kind '{other}' (corpus, gaussian, phi, zero, grid, toml)"))),
        };
        let harmonic = harmonic.map(parse_triple).transpose()?.map(|t| HarmonicSpec { basis: Some(t), ..Default::default() });
        Ok(FieldSpec { n: Some(n), components: vec![ComponentSpec { profile, harmonic, coefficient: None }], ..Default::default() })
    }
}

pub fn parse_triple(s: &str) -> Result<[usize; 3], Failure> {
    let v: Vec<usize> = s.split(',').map(|x| x.trim().parse()).collect::<Result<_, _>>().map_err(|_| Failure::Usage(format!("'{s}' is not p,q,index")))?;
    <[usize; 3]>::try_from(v).map_err(|_| Failure::Usage(format!("'{s}' is not p,q,index")))
}

/// `[re_1, im_1, ..., re_n, im_n]` to a point of `C^n`.
pub fn point(v: &[f64], n: usize) -> Result<Vec<Complex64>, Failure> {
    if v.len() != 2 * n {
        return Err(Failure::Usage(format!("point {v:?} needs {} numbers for C^{n}", 2 * n)));
    }
    Ok(v.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect())
}

/// Parses `re,im[,re,im]` from the command line.
pub fn point_arg(s: &str, n: usize) -> Result<Vec<Complex64>, Failure> {
    let v: Vec<f64> = s.split(',').map(|x| x.trim().parse()).collect::<Result<_, _>>().map_err(|_| Failure::Usage(format!("'{s}' is not a list of numbers")))?;
    point(&v, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shorthand_forms() {
        let f = FieldSpec::from_shorthand("gaussian:a=0.5", None).unwrap().resolve(0).unwrap();
        assert_eq!(f.n(), 1);
        let v = f.field().eval(&[Complex64::new(1.0, 0.0)]);
        assert!((v.re - (-0.5f64).exp()).abs() < 1e-15);
        let f = FieldSpec::from_shorthand("phi:k=0,n=2", Some("1,0,0")).unwrap().resolve(0).unwrap();
        assert_eq!(f.n(), 2);
        assert!(matches!(FieldSpec::from_shorthand("corpus:99", None).unwrap().resolve(0), Err(Failure::Usage(_))));
        assert!(matches!(FieldSpec::from_shorthand("gaussian", None), Err(Failure::Usage(_))));
        assert!(matches!(FieldSpec::from_shorthand("spline:a=1", None), Err(Failure::Usage(_))));
    }

    #[test]
    fn explicit_monomials_must_be_harmonic() {
        let z = HarmonicSpec { monomials: Some(vec![MonomialSpec { alpha: vec![1], beta: vec![0], re: 1.0, im: 0.0 }]), ..Default::default() };
        assert_eq!(z.build(1).unwrap().p(), 1);
        let zz = HarmonicSpec { monomials: Some(vec![MonomialSpec { alpha: vec![1], beta: vec![1], re: 1.0, im: 0.0 }]), ..Default::default() };
        assert!(zz.build(1).is_err());
    }
}
