use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;

const MAGIC: &[u8; 4] = b"TWGF";

/// Uniform grid on `[-L, L)^{2n}` with nodes `-L + i h`, `h = 2L / steps`.
///
/// Axes are ordered `(Re z_1, Im z_1, Re z_2, ...)`, row-major.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n: usize,
    pub extent: f64,
    pub steps: usize,
}

impl GridSpec {
    pub fn new(n: usize, extent: f64, steps: usize) -> Result<Self> {
        if !(1..=2).contains(&n) {
            return Err(Error::invalid(format!("grids are supported for n = 1, 2 (got {n})")));
        }
        if !(extent.is_finite() && extent > 0.0) {
            return Err(Error::invalid(format!("extent must be positive, got {extent}")));
        }
        if steps < 2 || steps % 2 != 0 {
            return Err(Error::invalid(format!("steps per axis must be even and >= 2, got {steps}")));
        }
        let total = (steps as f64).powi(2 * n as i32);
        if total > 1.2e8 {
            return Err(Error::Guardrail(format!("{steps}^{} grid nodes", 2 * n)));
        }
        Ok(GridSpec { n, extent, steps })
    }

    /// `L = 12`, 256 steps for `n = 1`; `L = 8`, 32 steps for `n = 2`.
    pub fn default_for(n: usize) -> Result<Self> {
        match n {
            1 => Self::new(1, 12.0, 256),
            2 => Self::new(2, 8.0, 32),
            _ => Err(Error::invalid(format!("no default grid for n = {n}"))),
        }
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.extent / self.steps as f64
    }

    pub fn axes(&self) -> usize {
        2 * self.n
    }

    pub fn len(&self) -> usize {
        self.steps.pow(self.axes() as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn coordinate(&self, i: usize) -> f64 {
        -self.extent + i as f64 * self.spacing()
    }

    /// Trapezoid weight of one node.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.axes() as i32)
    }

    pub fn multi_index(&self, mut idx: usize, out: &mut [usize]) {
        for a in (0..self.axes()).rev() {
            out[a] = idx % self.steps;
            idx /= self.steps;
        }
    }

    /// Node position as a point of `C^n`.
    pub fn node(&self, idx: usize, out: &mut [Complex64]) {
        let mut mi = [0usize; 4];
        self.multi_index(idx, &mut mi);
        for j in 0..self.n {
            out[j] = Complex64::new(self.coordinate(mi[2 * j]), self.coordinate(mi[2 * j + 1]));
        }
    }

    /// Whether the node touches the edge of the sampled box.
    pub fn on_boundary(&self, idx: usize) -> bool {
        let mut mi = [0usize; 4];
        self.multi_index(idx, &mut mi);
        mi[..self.axes()].iter().any(|&i| i == 0 || i + 1 == self.steps)
    }

    /// Halved spacing over the same box.
    pub fn refined(&self) -> Result<Self> {
        Self::new(self.n, self.extent, self.steps * 2)
    }
}

/// Samples of a complex function on a [`GridSpec`].
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    pub spec: GridSpec,
    pub samples: Vec<Complex64>,
    pub tag: String,
}

/// Payload width in the binary format.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Precision {
    Single,
    Double,
}

impl GridFunction {
    pub fn new(spec: GridSpec, samples: Vec<Complex64>, tag: impl Into<String>) -> Result<Self> {
        if samples.len() != spec.len() {
            return Err(Error::DimensionMismatch { expected: spec.len(), got: samples.len() });
        }
        if let Some(i) = samples.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite(format!("grid sample {i}")));
        }
        Ok(GridFunction { spec, samples, tag: tag.into() })
    }

    pub fn from_field(spec: GridSpec, f: &dyn Field, tag: impl Into<String>) -> Result<Self> {
        if f.dim() != spec.n {
            return Err(Error::DimensionMismatch { expected: spec.n, got: f.dim() });
        }
        let samples = par::map_range(spec.len(), |i| {
            let mut z = [Complex64::new(0.0, 0.0); 2];
            spec.node(i, &mut z[..spec.n]);
            f.eval(&z[..spec.n])
        });
        Self::new(spec, samples, tag)
    }

    /// Multilinear interpolation; zero outside the sampled box.
    pub fn interpolate(&self, z: &[Complex64]) -> Complex64 {
        let s = &self.spec;
        let h = s.spacing();
        let axes = s.axes();
        let mut base = [0isize; 4];
        let mut frac = [0.0f64; 4];
        for j in 0..s.n {
            for (a, x) in [(2 * j, z[j].re), (2 * j + 1, z[j].im)] {
                let t = (x + s.extent) / h;
                let i0 = t.floor();
                base[a] = i0 as isize;
                frac[a] = t - i0;
            }
        }
        let mut acc = Complex64::new(0.0, 0.0);
        'corner: for corner in 0..(1usize << axes) {
            let mut w = 1.0;
            let mut idx = 0usize;
            for a in 0..axes {
                let up = (corner >> a) & 1 == 1;
                let fw = if up { frac[a] } else { 1.0 - frac[a] };
                if fw == 0.0 {
                    continue 'corner;
                }
                let i = base[a] + up as isize;
                if i < 0 || i >= s.steps as isize {
                    continue 'corner;
                }
                w *= fw;
                idx = idx * s.steps + i as usize;
            }
            acc += self.samples[idx] * w;
        }
        acc
    }

    pub fn write_to(&self, w: &mut impl Write, precision: Precision) -> Result<()> {
        let io = |e: std::io::Error| Error::Format(e.to_string());
        w.write_all(MAGIC).map_err(io)?;
        w.write_all(&(self.spec.n as u32).to_le_bytes()).map_err(io)?;
        w.write_all(&self.spec.extent.to_le_bytes()).map_err(io)?;
        w.write_all(&(self.spec.steps as u32).to_le_bytes()).map_err(io)?;
        w.write_all(&[match precision {
            Precision::Single => 32u8,
            Precision::Double => 64u8,
        }])
        .map_err(io)?;
        w.write_all(&(self.tag.len() as u32).to_le_bytes()).map_err(io)?;
        w.write_all(self.tag.as_bytes()).map_err(io)?;
        let mut buf = Vec::with_capacity(self.samples.len() * 16);
        for v in &self.samples {
            match precision {
                Precision::Single => {
                    buf.extend_from_slice(&(v.re as f32).to_le_bytes());
                    buf.extend_from_slice(&(v.im as f32).to_le_bytes());
                }
                Precision::Double => {
                    buf.extend_from_slice(&v.re.to_le_bytes());
                    buf.extend_from_slice(&v.im.to_le_bytes());
                }
            }
        }
        w.write_all(&buf).map_err(io)
    }

    pub fn read_from(r: &mut impl Read) -> Result<Self> {
        let io = |e: std::io::Error| Error::Format(e.to_string());
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic).map_err(io)?;
        if &magic != MAGIC {
            return Err(Error::Format("not a grid function file (bad magic)".into()));
        }
        let mut b4 = [0u8; 4];
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b4).map_err(io)?;
        let n = u32::from_le_bytes(b4) as usize;
        r.read_exact(&mut b8).map_err(io)?;
        let extent = f64::from_le_bytes(b8);
        r.read_exact(&mut b4).map_err(io)?;
        let steps = u32::from_le_bytes(b4) as usize;
        let mut prec = [0u8; 1];
        r.read_exact(&mut prec).map_err(io)?;
        r.read_exact(&mut b4).map_err(io)?;
        let tag_len = u32::from_le_bytes(b4) as usize;
        if tag_len > 1 << 20 {
            return Err(Error::Format(format!("tag length {tag_len} is implausible")));
        }
        let mut tag = vec![0u8; tag_len];
        r.read_exact(&mut tag).map_err(io)?;
        let tag = String::from_utf8(tag).map_err(|e| Error::Format(e.to_string()))?;
        let spec = GridSpec::new(n, extent, steps)?;
        let width = match prec[0] {
            32 => 4,
            64 => 8,
            p => return Err(Error::Format(format!("unknown precision byte {p}"))),
        };
        let mut payload = vec![0u8; spec.len() * 2 * width];
        r.read_exact(&mut payload).map_err(io)?;
        let samples = payload
            .chunks_exact(2 * width)
            .map(|c| {
                if width == 4 {
                    let re = f32::from_le_bytes(c[..4].try_into().unwrap());
                    let im = f32::from_le_bytes(c[4..].try_into().unwrap());
                    Complex64::new(re as f64, im as f64)
                } else {
                    let re = f64::from_le_bytes(c[..8].try_into().unwrap());
                    let im = f64::from_le_bytes(c[8..].try_into().unwrap());
                    Complex64::new(re, im)
                }
            })
            .collect();
        Self::new(spec, samples, tag)
    }
}

/// A complex-valued function on `C^n`.
pub trait Field: Sync {
    fn dim(&self) -> usize;
    fn eval(&self, z: &[Complex64]) -> Complex64;
}

impl Field for GridFunction {
    fn dim(&self) -> usize {
        self.spec.n
    }
    fn eval(&self, z: &[Complex64]) -> Complex64 {
        self.interpolate(z)
    }
}

/// Wraps a closure as a [`Field`].
pub struct FnField<F> {
    n: usize,
    f: F,
}

impl<F: Fn(&[Complex64]) -> Complex64 + Sync> FnField<F> {
    pub fn new(n: usize, f: F) -> Self {
        FnField { n, f }
    }
}

impl<F: Fn(&[Complex64]) -> Complex64 + Sync> Field for FnField<F> {
    fn dim(&self) -> usize {
        self.n
    }
    fn eval(&self, z: &[Complex64]) -> Complex64 {
        (self.f)(z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometry() {
        let g = GridSpec::new(1, 2.0, 4).unwrap();
        assert_eq!(g.len(), 16);
        assert_eq!(g.spacing(), 1.0);
        let mut z = [Complex64::new(0.0, 0.0)];
        g.node(6, &mut z);
        assert_eq!(z[0], Complex64::new(-1.0, 0.0));
        assert!(GridSpec::new(1, 2.0, 5).is_err());
        assert!(GridSpec::new(3, 2.0, 4).is_err());
    }

    #[test]
    fn interpolation_is_exact_for_multilinear() {
        let spec = GridSpec::new(2, 2.0, 8).unwrap();
        let f = FnField::new(2, |z: &[Complex64]| Complex64::new(1.0 + z[0].re - 2.0 * z[1].im, z[0].im * z[1].re));
        let g = GridFunction::from_field(spec, &f, "bilinear").unwrap();
        for p in [[0.3, -0.2, 0.7, 1.1], [-1.9, 0.0, 0.25, -1.5], [0.5, 0.5, 0.5, 0.5]] {
            let z = [Complex64::new(p[0], p[1]), Complex64::new(p[2], p[3])];
            assert!((g.interpolate(&z) - f.eval(&z)).norm() < 1e-13);
        }
        assert_eq!(g.interpolate(&[Complex64::new(5.0, 0.0), Complex64::new(0.0, 0.0)]), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn binary_round_trip() {
        let spec = GridSpec::new(1, 3.0, 6).unwrap();
        let f = FnField::new(1, |z: &[Complex64]| z[0] * z[0].conj() + z[0]);
        let g = GridFunction::from_field(spec, &f, "rt").unwrap();
        let mut buf = Vec::new();
        g.write_to(&mut buf, Precision::Double).unwrap();
        assert_eq!(GridFunction::read_from(&mut buf.as_slice()).unwrap(), g);
        let mut buf = Vec::new();
        g.write_to(&mut buf, Precision::Single).unwrap();
        let back = GridFunction::read_from(&mut buf.as_slice()).unwrap();
        for (a, b) in back.samples.iter().zip(&g.samples) {
            assert!((a - b).norm() < 1e-5);
        }
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(GridFunction::read_from(&mut bad.as_slice()).is_err());
        assert!(GridFunction::read_from(&mut &buf[..buf.len() - 3]).is_err());
    }
}
