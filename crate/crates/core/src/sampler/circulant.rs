use std::sync::Arc;

use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use super::{GaussianDraw, GridSpec, Locations};
use crate::error::{Error, Result};
use crate::field_models::CovarianceModel;
use crate::seed;

/// Largest padding factor tried before giving up on the embedding.
pub const MAX_PADDING: usize = 8;

/// Cap on the number of torus nodes (complex f64 entries) per draw.
pub const MAX_TORUS_NODES: usize = 1 << 26;

/// Normalized eigenvalues below `-NEGATIVE_TOLERANCE` reject the embedding;
/// smaller negative values are rounding noise and are set to zero.
const NEGATIVE_TOLERANCE: f64 = 1e-9;

/// Exact Gaussian simulation on a regular grid by circulant embedding.
///
/// The covariance is embedded in a torus `padding` times the grid side on
/// every axis. The eigenvalues of the resulting block-circulant matrix are
/// one d-dimensional FFT of its first row; a draw is the real part of the
/// FFT of independent complex normals weighted by their square roots.
pub struct CirculantSampler {
    model: CovarianceModel,
    grid: GridSpec,
    padding: usize,
    torus_side: usize,
    sqrt_weights: Vec<f64>,
    plan: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for CirculantSampler {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CirculantSampler")
            .field("model", &self.model)
            .field("grid", &self.grid)
            .field("padding", &self.padding)
            .finish()
    }
}

impl CirculantSampler {
    pub fn new(model: CovarianceModel, grid: GridSpec) -> Result<Self> {
        let mut padding = 2;
        let mut last_min = f64::NAN;
        while padding <= MAX_PADDING {
            let side = grid.side() * padding;
            let total = side
                .checked_pow(grid.d as u32)
                .filter(|&t| t <= MAX_TORUS_NODES)
                .ok_or(Error::Capacity {
                    what: "circulant torus nodes",
                    requested: side.saturating_pow(grid.d as u32),
                    cap: MAX_TORUS_NODES,
                })?;
            let plan = FftPlanner::new().plan_fft_forward(side);

            let mut row: Vec<Complex<f64>> = (0..total)
                .map(|lin| {
                    let mut rem = lin;
                    let mut r2 = 0.0;
                    for _ in 0..grid.d {
                        let k = rem % side;
                        rem /= side;
                        let wrapped = k.min(side - k) as f64 * grid.spacing;
                        r2 += wrapped * wrapped;
                    }
                    Complex::new(model.at_distance(r2.sqrt()), 0.0)
                })
                .collect();
            fft_nd(&mut row, side, grid.d, plan.as_ref());

            let scale = 1.0 / total as f64;
            let min = row.iter().map(|c| c.re * scale).fold(f64::INFINITY, f64::min);
            if min >= -NEGATIVE_TOLERANCE {
                let sqrt_weights = row.iter().map(|c| (c.re * scale).max(0.0).sqrt()).collect();
                log::debug!("circulant embedding accepted at padding {padding}x, min eigenvalue {min:e}");
                return Ok(Self {
                    model,
                    grid,
                    padding,
                    torus_side: side,
                    sqrt_weights,
                    plan,
                });
            }
            last_min = min;
            padding *= 2;
        }
        Err(Error::EmbeddingNotNonnegative {
            min_eigenvalue: last_min,
            padding: MAX_PADDING,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn padding(&self) -> usize {
        self.padding
    }

    pub fn model(&self) -> &CovarianceModel {
        &self.model
    }
}

impl GaussianDraw for CirculantSampler {
    fn locations(&self) -> Locations {
        Locations::Grid(self.grid)
    }

    fn draw(&self, seed: u64) -> Vec<f64> {
        let mut rng = seed::rng_from_seed(seed);
        let mut buf: Vec<Complex<f64>> = self
            .sqrt_weights
            .iter()
            .map(|&w| {
                let a: f64 = StandardNormal.sample(&mut rng);
                let b: f64 = StandardNormal.sample(&mut rng);
                Complex::new(w * a, w * b)
            })
            .collect();
        fft_nd(&mut buf, self.torus_side, self.grid.d, self.plan.as_ref());

        // Copy out the leading (2N)^d corner of the torus.
        let side = self.grid.side();
        let d = self.grid.d;
        let mut out = Vec::with_capacity(self.grid.node_count());
        let mut idx = vec![0usize; d];
        loop {
            let lin = idx.iter().fold(0usize, |acc, &k| acc * self.torus_side + k);
            out.push(buf[lin].re);
            let mut axis = d;
            loop {
                if axis == 0 {
                    return out;
                }
                axis -= 1;
                idx[axis] += 1;
                if idx[axis] < side {
                    break;
                }
                idx[axis] = 0;
            }
        }
    }

    fn tag(&self) -> String {
        format!(
            "{}/circulant(pad={}x)/{}",
            self.model.tag(),
            self.padding,
            seed::RNG_NAME
        )
    }
}

/// In-place unnormalized d-dimensional FFT on a cube of side `side`.
fn fft_nd(buf: &mut [Complex<f64>], side: usize, d: usize, plan: &dyn Fft<f64>) {
    let mut scratch = vec![Complex::new(0.0, 0.0); plan.get_inplace_scratch_len()];
    // Last axis is contiguous.
    plan.process_with_scratch(buf, &mut scratch);
    if d == 1 {
        return;
    }
    const BATCH: usize = 16;
    let mut lines = vec![Complex::new(0.0, 0.0); side * BATCH];
    for axis in 0..d - 1 {
        let stride = side.pow((d - 1 - axis) as u32);
        let block = stride * side;
        for start in (0..buf.len()).step_by(block) {
            let mut j = 0;
            while j < stride {
                let width = BATCH.min(stride - j);
                for t in 0..side {
                    let src = start + t * stride + j;
                    for w in 0..width {
                        lines[w * side + t] = buf[src + w];
                    }
                }
                plan.process_with_scratch(&mut lines[..width * side], &mut scratch);
                for t in 0..side {
                    let dst = start + t * stride + j;
                    for w in 0..width {
                        buf[dst + w] = lines[w * side + t];
                    }
                }
                j += width;
            }
        }
    }
}
