use num_complex::Complex64;
use serde::Serialize;

use super::twist_phase;
use crate::error::{Error, Result};
use crate::par;

pub const MAX_Z_NODES: usize = 32;
pub const MAX_T_NODES: usize = 33;

/// Sampling of `C x [-T, T]` for `n = 1`: `z_nodes` per real axis on
/// `[-Lz, Lz)` and `t_nodes` (odd) on `[-T, T]` including both ends.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SliceGrid {
    pub z_nodes: usize,
    pub z_extent: f64,
    pub t_nodes: usize,
    pub t_extent: f64,
}

impl SliceGrid {
    pub fn new(z_nodes: usize, z_extent: f64, t_nodes: usize, t_extent: f64) -> Result<Self> {
        if z_nodes > MAX_Z_NODES || t_nodes > MAX_T_NODES {
            return Err(Error::Guardrail(format!(
                "slice grid {z_nodes}^2 x {t_nodes} exceeds {MAX_Z_NODES}^2 x {MAX_T_NODES}"
            )));
        }
        if z_nodes < 4 || z_nodes % 2 != 0 || t_nodes < 3 || t_nodes % 2 == 0 {
            return Err(Error::invalid("need even z_nodes >= 4 and odd t_nodes >= 3"));
        }
        if !(z_extent > 0.0 && t_extent > 0.0) {
            return Err(Error::invalid("extents must be positive"));
        }
        Ok(SliceGrid { z_nodes, z_extent, t_nodes, t_extent })
    }

    /// `16^2 x 17` nodes on `[-4, 4)^2 x [-4, 4]`.
    pub fn demo() -> Self {
        SliceGrid { z_nodes: 16, z_extent: 4.0, t_nodes: 17, t_extent: 4.0 }
    }

    pub fn refined(&self) -> Result<Self> {
        Self::new(2 * self.z_nodes, self.z_extent, 2 * self.t_nodes - 1, self.t_extent)
    }

    pub fn hz(&self) -> f64 {
        2.0 * self.z_extent / self.z_nodes as f64
    }

    pub fn ht(&self) -> f64 {
        2.0 * self.t_extent / (self.t_nodes - 1) as f64
    }

    fn z_coord(&self, a: usize) -> f64 {
        -self.z_extent + a as f64 * self.hz()
    }

    fn t_coord(&self, j: usize) -> f64 {
        -self.t_extent + j as f64 * self.ht()
    }

    fn t_weight(&self, j: usize) -> f64 {
        if j == 0 || j + 1 == self.t_nodes {
            0.5 * self.ht()
        } else {
            self.ht()
        }
    }
}

struct Samples<'a> {
    grid: &'a SliceGrid,
    v: Vec<Complex64>,
}

impl Samples<'_> {
    fn at(&self, a: usize, b: usize, j: usize) -> Complex64 {
        self.v[(a * self.grid.z_nodes + b) * self.grid.t_nodes + j]
    }

    /// Trilinear interpolation, zero outside the sampled box.
    fn interp(&self, z: Complex64, t: f64) -> Complex64 {
        let g = self.grid;
        let pos = [(z.re + g.z_extent) / g.hz(), (z.im + g.z_extent) / g.hz(), (t + g.t_extent) / g.ht()];
        let lim = [g.z_nodes, g.z_nodes, g.t_nodes];
        let mut acc = Complex64::new(0.0, 0.0);
        'corner: for c in 0..8 {
            let mut idx = [0usize; 3];
            let mut w = 1.0;
            for a in 0..3 {
                let i0 = pos[a].floor();
                let fr = pos[a] - i0;
                let up = (c >> a) & 1 == 1;
                let fw = if up { fr } else { 1.0 - fr };
                if fw == 0.0 {
                    continue 'corner;
                }
                let i = i0 as isize + up as isize;
                if i < 0 || i >= lim[a] as isize {
                    continue 'corner;
                }
                idx[a] = i as usize;
                w *= fw;
            }
            acc += self.at(idx[0], idx[1], idx[2]) * w;
        }
        acc
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HeisenbergDemo {
    pub lambda: f64,
    pub grid: SliceGrid,
    pub probes: Vec<Complex64>,
    /// Fourier transform in `t` of the group convolution.
    pub group: Vec<Complex64>,
    /// Twisted convolution of the `lambda`-slices.
    pub twisted: Vec<Complex64>,
    pub residual: f64,
    pub scale: f64,
    pub rel_residual: f64,
}

fn sample(grid: &SliceGrid, f: &(dyn Fn(Complex64, f64) -> Complex64 + Sync)) -> Vec<Complex64> {
    let mut v = Vec::with_capacity(grid.z_nodes * grid.z_nodes * grid.t_nodes);
    for a in 0..grid.z_nodes {
        for b in 0..grid.z_nodes {
            let z = Complex64::new(grid.z_coord(a), grid.z_coord(b));
            for j in 0..grid.t_nodes {
                v.push(f(z, grid.t_coord(j)));
            }
        }
    }
    v
}

/// Probe points that are nodes of the demo grid and of its refinement.
pub fn default_probes() -> Vec<Complex64> {
    [(0.0, 0.0), (0.5, 0.0), (0.0, -1.0), (1.0, 0.5), (-0.5, -0.5)].iter().map(|&(a, b)| Complex64::new(a, b)).collect()
}

/// Group convolution `int f((z,t)(-w,-s)) g(w,s) dw ds` on the slice grid,
/// Fourier-transformed in `t` at frequency `lambda`, versus the twisted
/// convolution of the transformed slices. Returns the largest difference
/// over the probes.
pub fn heisenberg_slice_demo(
    f: &(dyn Fn(Complex64, f64) -> Complex64 + Sync),
    g: &(dyn Fn(Complex64, f64) -> Complex64 + Sync),
    grid: &SliceGrid,
    lambda: f64,
    probes: &[Complex64],
) -> Result<HeisenbergDemo> {
    let grid = &SliceGrid::new(grid.z_nodes, grid.z_extent, grid.t_nodes, grid.t_extent)?;
    for z in probes {
        if z.re.abs() > grid.z_extent / 2.0 || z.im.abs() > grid.z_extent / 2.0 {
            return Err(Error::Domain { point: format!("{z}"), limit: grid.z_extent / 2.0 });
        }
    }
    let fs = Samples { grid, v: sample(grid, f) };
    let gs = Samples { grid, v: sample(grid, g) };
    if fs.v.iter().chain(&gs.v).any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::NonFinite("slice samples".into()));
    }
    let m = grid.z_nodes;
    let hz2 = grid.hz() * grid.hz();
    let chars: Vec<Complex64> = (0..grid.t_nodes).map(|j| Complex64::from_polar(grid.t_weight(j), lambda * grid.t_coord(j))).collect();

    // lambda-slices on the z grid
    let slice = |s: &Samples| -> Vec<Complex64> {
        let mut v = Vec::with_capacity(m * m);
        for a in 0..m {
            for b in 0..m {
                v.push((0..grid.t_nodes).map(|j| s.at(a, b, j) * chars[j]).sum());
            }
        }
        v
    };
    let flat = SliceGrid { t_nodes: 1, ..*grid };
    let f_l = Samples { grid: &flat, v: slice(&fs) };
    let g_l = Samples { grid: &flat, v: slice(&gs) };

    let rows = par::map(probes, |&z| {
        let zs = [z];
        // group convolution at (z, t_j), then transform in t
        let mut group = Complex64::new(0.0, 0.0);
        for (j, ch) in chars.iter().enumerate() {
            let t = grid.t_coord(j);
            let mut acc = Complex64::new(0.0, 0.0);
            for a in 0..m {
                for b in 0..m {
                    let w = Complex64::new(grid.z_coord(a), grid.z_coord(b));
                    let shift = 0.5 * (z * w.conj()).im;
                    for l in 0..grid.t_nodes {
                        let gv = gs.at(a, b, l);
                        if gv == Complex64::new(0.0, 0.0) {
                            continue;
                        }
                        acc += fs.interp(z - w, t - grid.t_coord(l) - shift) * gv * grid.t_weight(l);
                    }
                }
            }
            group += acc * hz2 * ch;
        }
        let mut tw = Complex64::new(0.0, 0.0);
        for a in 0..m {
            for b in 0..m {
                let w = Complex64::new(grid.z_coord(a), grid.z_coord(b));
                let fv = f_l.interp(z - w, 0.0);
                if fv == Complex64::new(0.0, 0.0) {
                    continue;
                }
                tw += fv * g_l.at(a, b, 0) * twist_phase(lambda, &zs, &[w]);
            }
        }
        (group, tw * hz2)
    });
    let group: Vec<Complex64> = rows.iter().map(|r| r.0).collect();
    let twisted: Vec<Complex64> = rows.iter().map(|r| r.1).collect();
    let residual = group.iter().zip(&twisted).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    let scale = twisted.iter().map(|v| v.norm()).fold(0.0, f64::max);
    Ok(HeisenbergDemo {
        lambda,
        grid: *grid,
        probes: probes.to_vec(),
        group,
        twisted,
        residual,
        scale,
        rel_residual: if scale > 0.0 { residual / scale } else { residual },
    })
}

/// `e^{-|z|^2} e^{-t^2}`.
pub fn separable_gaussian(z: Complex64, t: f64) -> Complex64 {
    Complex64::new((-z.norm_sqr() - t * t).exp(), 0.0)
}
