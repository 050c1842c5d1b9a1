//! Discrete volume potential (K v)_i = Σ_j K_ij v_j on a lattice grid.
//!
//! K_ij = G(x_i − x_j)·w for i ≠ j and K_ii is the self-cell weight. The
//! kernel depends only on the lattice offset, so products are evaluated as
//! a zero-padded circular convolution with FFTs.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::Result;
use crate::geometry::DomainGrid;
use crate::kernel::{green_at_distance, self_cell_weight};

pub struct VolumeOperator {
    grid: Arc<DomainGrid>,
    k: f64,
    padded: usize,
    kernel_hat: Vec<Complex64>,
    self_weight: Complex64,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for VolumeOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("VolumeOperator")
            .field("cells", &self.grid.len())
            .field("k", &self.k)
            .field("padded", &self.padded)
            .finish()
    }
}

impl VolumeOperator {
    pub fn new(grid: Arc<DomainGrid>, k: f64) -> Result<Self> {
        let n = grid.resolution;
        let p = 2 * n;
        let w = grid.cell_volume();
        let self_weight = self_cell_weight(w, k)?;
        let h = grid.spacing;
        let wrap = |t: usize| -> f64 {
            if t < n {
                t as f64
            } else {
                t as f64 - p as f64
            }
        };
        let mut kernel: Vec<Complex64> = (0..p * p * p)
            .into_par_iter()
            .map(|idx| {
                let (i, j, l) = (idx / (p * p), (idx / p) % p, idx % p);
                if i == 0 && j == 0 && l == 0 {
                    return self_weight;
                }
                let d = [wrap(i) * h[0], wrap(j) * h[1], wrap(l) * h[2]];
                let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
                green_at_distance(r, k) * w
            })
            .collect();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(p);
        let inverse = planner.plan_fft_inverse(p);
        fft3d(&mut kernel, p, forward.as_ref());
        let scale = 1.0 / (p * p * p) as f64;
        kernel.iter_mut().for_each(|v| *v *= scale);
        Ok(Self {
            grid,
            k,
            padded: p,
            kernel_hat: kernel,
            self_weight,
            forward,
            inverse,
        })
    }

    pub fn grid(&self) -> &Arc<DomainGrid> {
        &self.grid
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn self_weight(&self) -> Complex64 {
        self.self_weight
    }

    /// out ← K v
    pub fn apply(&self, v: &[Complex64], out: &mut [Complex64]) {
        let p = self.padded;
        let mut buf = vec![Complex64::new(0.0, 0.0); p * p * p];
        for (val, ijk) in v.iter().zip(&self.grid.indices) {
            buf[(ijk[0] * p + ijk[1]) * p + ijk[2]] = *val;
        }
        fft3d(&mut buf, p, self.forward.as_ref());
        buf.par_iter_mut()
            .zip(self.kernel_hat.par_iter())
            .for_each(|(b, kh)| *b *= kh);
        fft3d(&mut buf, p, self.inverse.as_ref());
        for (o, ijk) in out.iter_mut().zip(&self.grid.indices) {
            *o = buf[(ijk[0] * p + ijk[1]) * p + ijk[2]];
        }
    }

    pub fn apply_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
        self.apply(v, &mut out);
        out
    }
}

/// In-place 3-D FFT of a p×p×p array stored with the last axis contiguous.
fn fft3d(data: &mut [Complex64], p: usize, fft: &dyn Fft<f64>) {
    // Last axis: contiguous rows.
    data.par_chunks_mut(p).for_each(|row| fft.process(row));
    // Middle axis: strided within each plane.
    data.par_chunks_mut(p * p).for_each(|plane| {
        let mut line = vec![Complex64::new(0.0, 0.0); p];
        for l in 0..p {
            for j in 0..p {
                line[j] = plane[j * p + l];
            }
            fft.process(&mut line);
            for j in 0..p {
                plane[j * p + l] = line[j];
            }
        }
    });
    // First axis: gather columns, transform, scatter back.
    let plane = p * p;
    let columns: Vec<Vec<Complex64>> = (0..plane)
        .into_par_iter()
        .map(|jl| {
            let mut line: Vec<Complex64> = (0..p).map(|i| data[i * plane + jl]).collect();
            fft.process(&mut line);
            line
        })
        .collect();
    for (jl, line) in columns.into_iter().enumerate() {
        for (i, v) in line.into_iter().enumerate() {
            data[i * plane + jl] = v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DomainSpec;
    use crate::kernel::green_kernel;

    fn dense_apply(grid: &DomainGrid, k: f64, v: &[Complex64]) -> Vec<Complex64> {
        let w = grid.cell_volume();
        let s = self_cell_weight(w, k).unwrap();
        grid.cell_centers
            .iter()
            .map(|xi| {
                grid.cell_centers
                    .iter()
                    .zip(v)
                    .map(|(xj, vj)| match green_kernel(xi, xj, k) {
                        Ok(g) => g * w * vj,
                        Err(_) => s * vj,
                    })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn fft_convolution_matches_dense_sum() {
        for (domain, res) in [
            (DomainSpec::unit_ball(), 7),
            (
                DomainSpec::Box {
                    min: [0.0, -1.0, 0.5],
                    max: [2.0, 0.0, 1.0],
                },
                5,
            ),
        ] {
            let grid = Arc::new(DomainGrid::build(domain, res).unwrap());
            let k = 1.7;
            let op = VolumeOperator::new(grid.clone(), k).unwrap();
            let v: Vec<Complex64> = grid
                .cell_centers
                .iter()
                .map(|x| Complex64::new(x[0] + 0.3 * x[2], (x[1] * 2.0).sin()))
                .collect();
            let fast = op.apply_vec(&v);
            let slow = dense_apply(&grid, k, &v);
            let scale = slow.iter().map(|z| z.norm()).fold(0.0, f64::max);
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a - b).norm() < 1e-12 * scale, "{a} vs {b}");
            }
        }
    }
}
