use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::sphere::least_squares;
use super::spectral_projections;
use crate::error::{Error, Result};
use crate::exact::ln_factorial;
use crate::laguerre::laguerre_eval;
use crate::twisted::{Field, GridSpec};

#[derive(Clone, Debug)]
pub struct ConeConfig {
    /// Directions `z^0`; each spans the complex ray `r e^{i theta} z^0`.
    pub directions: Vec<Vec<Complex64>>,
    pub k_max: usize,
    /// Truncation of the `t` index in the fit.
    pub t_max: usize,
    pub radii: Vec<f64>,
    pub angles: usize,
    pub grid: GridSpec,
    /// Coefficients below `zero_tol * sup|f|` count as forced to zero.
    pub zero_tol: f64,
    pub seed: u64,
}

impl ConeConfig {
    pub fn new(directions: Vec<Vec<Complex64>>, k_max: usize, seed: u64) -> Result<Self> {
        Ok(ConeConfig {
            directions,
            k_max,
            t_max: 3,
            radii: vec![0.4, 0.8, 1.2, 1.6, 2.0],
            angles: (k_max + 3 + 2).max(8),
            grid: GridSpec::new(2, 8.0, 32)?,
            zero_tol: 1e-6,
            seed,
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FittedCoefficient {
    pub k: usize,
    pub s: usize,
    pub t: usize,
    pub direction: usize,
    /// Fitted `P_{s,t}^k(z^0)`.
    pub value: Complex64,
    pub forced_zero: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DirectionFit {
    pub k: usize,
    pub direction: usize,
    pub condition: f64,
    pub residual: f64,
    /// Largest normalized inner product between fit columns of different
    /// angular frequency.
    pub frequency_coupling: f64,
}

/// Lowest radial coefficient of one angular frequency, fitted freely and
/// divided by the fitted `P_{s,t}^k(z^0)`.
#[derive(Clone, Debug, Serialize)]
pub struct BinomialCheck {
    pub k: usize,
    pub s: usize,
    pub t: usize,
    pub direction: usize,
    pub fitted: f64,
    pub exact: f64,
    pub rel_error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConeReport {
    pub seed: u64,
    pub directions: Vec<Vec<Complex64>>,
    pub k_max: usize,
    pub t_max: usize,
    pub radii: Vec<f64>,
    pub angles: usize,
    pub f_sup: f64,
    pub fits: Vec<DirectionFit>,
    pub coefficients: Vec<FittedCoefficient>,
    pub binomials: Vec<BinomialCheck>,
    pub verdict: String,
    pub note: String,
}

impl ConeReport {
    pub fn coefficient(&self, k: usize, s: usize, t: usize, direction: usize) -> Option<&FittedCoefficient> {
        self.coefficients.iter().find(|c| c.k == k && c.s == s && c.t == t && c.direction == direction)
    }
}

fn binom(a: usize, b: usize) -> f64 {
    (ln_factorial(a as u64) - ln_factorial(b as u64) - ln_factorial((a - b) as u64)).exp().round()
}

/// For each `k <= K` and direction, samples `e^{r^2/4} Q_k(r e^{i theta} z^0)`
/// and fits `sum_{s <= k, t <= T} c_{s,t} r^{s+t} e^{i(s-t) theta} L_{k-s}^{n+s+t-1}(r^2/2)`,
/// so `c_{s,t} = P_{s,t}^k(z^0)`.
pub fn cone_injectivity_experiment(f: &dyn Field, cfg: &ConeConfig) -> Result<ConeReport> {
    let n = 2;
    if f.dim() != n || cfg.grid.n != n {
        return Err(Error::invalid("the cone experiment runs on C^2"));
    }
    if cfg.directions.is_empty() {
        return Err(Error::ProbeSet("no cone directions".into()));
    }
    if cfg.angles < cfg.k_max + cfg.t_max + 1 {
        return Err(Error::ProbeSet(format!(
            "{} angles alias frequencies -{}..{}",
            cfg.angles, cfg.t_max, cfg.k_max
        )));
    }
    if cfg.radii.len() < cfg.k_max.min(cfg.t_max) + 1 || cfg.radii.iter().any(|r| !(*r > 0.0)) {
        return Err(Error::ProbeSet("too few or nonpositive radii".into()));
    }
    let dirs: Vec<Vec<Complex64>> = cfg
        .directions
        .iter()
        .map(|d| {
            let nrm = d.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            if d.len() != n || nrm == 0.0 {
                Err(Error::invalid("directions must be nonzero vectors in C^2"))
            } else {
                Ok(d.iter().map(|c| c / nrm).collect())
            }
        })
        .collect::<Result<_>>()?;

    let thetas: Vec<f64> = (0..cfg.angles).map(|a| 2.0 * PI * a as f64 / cfg.angles as f64).collect();
    let mut points = Vec::new();
    for d in &dirs {
        for &r in &cfg.radii {
            for &th in &thetas {
                let e = Complex64::from_polar(r, th);
                points.push(d.iter().map(|c| c * e).collect::<Vec<_>>());
            }
        }
    }
    let ks: Vec<usize> = (0..=cfg.k_max).collect();
    let q = spectral_projections(f, &ks, &cfg.grid, &points)?;

    // sup |f| over seeded points of the sampled ball
    let r_top = cfg.radii.iter().cloned().fold(0.0, f64::max);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let f_sup = (0..256)
        .map(|_| {
            let z: Vec<Complex64> =
                (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * (r_top / 2f64.sqrt())).collect();
            f.eval(&z).norm()
        })
        .fold(0.0, f64::max);
    let floor = cfg.zero_tol * f_sup;

    let per_dir = cfg.radii.len() * cfg.angles;
    let mut fits = Vec::new();
    let mut coefficients = Vec::new();
    let mut binomials = Vec::new();
    for k in 0..=cfg.k_max {
        let cols: Vec<(usize, usize)> = (0..=k).flat_map(|s| (0..=cfg.t_max).map(move |t| (s, t))).collect();
        for (di, _) in dirs.iter().enumerate() {
            let mut a = DMatrix::<Complex64>::zeros(per_dir, cols.len());
            let mut b = DVector::<Complex64>::zeros(per_dir);
            let mut row = 0;
            for &r in &cfg.radii {
                let x = r * r / 2.0;
                for &th in &thetas {
                    b[row] = q[k][di * per_dir + row] * (r * r / 4.0).exp();
                    for (c, &(s, t)) in cols.iter().enumerate() {
                        let beta = s as f64 - t as f64;
                        a[(row, c)] = Complex64::from_polar(r.powi((s + t) as i32), beta * th)
                            * laguerre_eval(k - s, (n + s + t - 1) as f64, x);
                    }
                    row += 1;
                }
            }
            let mut coupling = 0.0f64;
            for i in 0..cols.len() {
                for j in i + 1..cols.len() {
                    if cols[i].0 as i64 - cols[i].1 as i64 == cols[j].0 as i64 - cols[j].1 as i64 {
                        continue;
                    }
                    let ip = a.column(i).dotc(&a.column(j)).norm();
                    coupling = coupling.max(ip / (a.column(i).norm() * a.column(j).norm()));
                }
            }
            let (x, cond, res) = least_squares(a, &b)?;
            fits.push(DirectionFit { k, direction: di, condition: cond, residual: res, frequency_coupling: coupling });
            for (&(s, t), v) in cols.iter().zip(&x) {
                coefficients.push(FittedCoefficient { k, s, t, direction: di, value: *v, forced_zero: v.norm() <= floor });
            }

            // free polynomial fit per frequency, for frequencies carried by a single (s, t)
            for (&(s, t), v) in cols.iter().zip(&x) {
                if v.norm() <= floor {
                    continue;
                }
                let beta = s as i64 - t as i64;
                let same: Vec<_> = cols
                    .iter()
                    .zip(&x)
                    .filter(|((s2, t2), v2)| *s2 as i64 - *t2 as i64 == beta && v2.norm() > floor)
                    .collect();
                if same.len() != 1 || cfg.radii.len() < k - s + 1 {
                    continue;
                }
                let alpha = s + t;
                let deg = k - s;
                let mut am = DMatrix::<Complex64>::zeros(cfg.radii.len(), deg + 1);
                let mut bm = DVector::<Complex64>::zeros(cfg.radii.len());
                for (ri, &r) in cfg.radii.iter().enumerate() {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (ai, &th) in thetas.iter().enumerate() {
                        acc += q[k][di * per_dir + ri * cfg.angles + ai] * Complex64::from_polar(1.0, -(beta as f64) * th);
                    }
                    bm[ri] = acc / cfg.angles as f64 * (r * r / 4.0).exp();
                    for j in 0..=deg {
                        am[(ri, j)] = Complex64::new(r.powi((alpha + 2 * j) as i32), 0.0);
                    }
                }
                let (y, _, _) = least_squares(am, &bm)?;
                let fitted = (y[0] / v).re;
                let exact = binom(n + k + t - 1, k - s);
                binomials.push(BinomialCheck { k, s, t, direction: di, fitted, exact, rel_error: (fitted - exact).abs() / exact });
            }
        }
    }
    let verdict = if f_sup == 0.0 {
        "zero function"
    } else if coefficients.iter().all(|c| c.forced_zero) {
        "non-injective configuration detected"
    } else {
        "injective for this f-class"
    };
    Ok(ConeReport {
        seed: cfg.seed,
        directions: dirs,
        k_max: cfg.k_max,
        t_max: cfg.t_max,
        radii: cfg.radii.clone(),
        angles: cfg.angles,
        f_sup,
        fits,
        coefficients,
        binomials,
        verdict: verdict.into(),
        note: "the cone is represented by finitely many complex rays".into(),
    })
}
