use rand_distr::{Distribution, StandardNormal};

use super::{GaussianDraw, Locations};
use crate::error::{Error, Result};
use crate::field_models::CovarianceModel;
use crate::seed;

/// Default cap on the number of points for the dense factorization.
pub const DEFAULT_POINT_CAP: usize = 4096;

/// Residual variance below which a pivot is treated as zero. This plays the
/// role of a `1e-10` diagonal jitter: the factor reproduces every covariance
/// entry to within this amount.
pub const FACTOR_TOLERANCE: f64 = 1e-10;

/// Residual diagonals more negative than this mean the matrix is indefinite.
const INDEFINITE_TOLERANCE: f64 = 1e-8;

/// Exact Gaussian draws at scattered points from a diagonally pivoted
/// Cholesky factor `K ~ L L^T` of the covariance matrix.
///
/// Smooth covariances on dense point sets are numerically low rank, so the
/// factorization stops once the largest residual variance drops below
/// [`FACTOR_TOLERANCE`]; `L` is `n x rank`.
#[derive(Debug, Clone)]
pub struct PointSampler {
    model: CovarianceModel,
    points: Vec<Vec<f64>>,
    /// Row `u` holds `L[u, ..rank]` for unique point `u`.
    rows: Vec<Vec<f64>>,
    /// Unique-point row of every input point; exact duplicates share a row.
    row_of: Vec<usize>,
    rank: usize,
}

impl PointSampler {
    pub fn new(model: CovarianceModel, points: Vec<Vec<f64>>) -> Result<Self> {
        Self::with_cap(model, points, DEFAULT_POINT_CAP)
    }

    pub fn with_cap(model: CovarianceModel, points: Vec<Vec<f64>>, cap: usize) -> Result<Self> {
        let n = points.len();
        if n > cap {
            return Err(Error::Capacity {
                what: "points for dense covariance factorization",
                requested: n,
                cap,
            });
        }
        if let Some(d) = points.first().map(Vec::len) {
            if points.iter().any(|p| p.len() != d || p.iter().any(|x| !x.is_finite())) {
                return Err(Error::Contract("points must be finite and share one dimension".into()));
            }
        }

        let mut row_of = Vec::with_capacity(n);
        let mut unique: Vec<&Vec<f64>> = Vec::new();
        {
            let mut seen: std::collections::HashMap<Vec<u64>, usize> = std::collections::HashMap::new();
            for p in &points {
                let key: Vec<u64> = p.iter().map(|x| (x + 0.0).to_bits()).collect();
                let next = unique.len();
                let r = *seen.entry(key).or_insert(next);
                if r == next {
                    unique.push(p);
                }
                row_of.push(r);
            }
        }
        let n = unique.len();

        let mut residual = vec![1.0f64; n];
        let mut pivoted = vec![false; n];
        let mut rows: Vec<Vec<f64>> = vec![Vec::new(); n];
        let mut rank = 0;
        while rank < n {
            let mut p = usize::MAX;
            let mut best = f64::NEG_INFINITY;
            for (i, &r) in residual.iter().enumerate() {
                if !pivoted[i] && r > best {
                    p = i;
                    best = r;
                }
            }
            if !(best > FACTOR_TOLERANCE) {
                break;
            }
            let pivot = best.sqrt();
            let pivot_row = rows[p].clone();
            let anchor = unique[p];
            for i in 0..n {
                let value = if i == p {
                    pivot
                } else if pivoted[i] {
                    0.0
                } else {
                    let cov = model.at_lag(
                        &unique[i].iter().zip(anchor).map(|(a, b)| a - b).collect::<Vec<_>>(),
                    );
                    let partial: f64 = rows[i].iter().zip(&pivot_row).map(|(a, b)| a * b).sum();
                    (cov - partial) / pivot
                };
                rows[i].push(value);
                if i != p && !pivoted[i] {
                    residual[i] -= value * value;
                }
            }
            residual[p] = 0.0;
            pivoted[p] = true;
            rank += 1;
        }

        if let Some(worst) = residual.iter().copied().reduce(f64::min) {
            if worst < -INDEFINITE_TOLERANCE {
                return Err(Error::NotPositiveDefinite(format!(
                    "residual variance {worst:e} after rank {rank} factorization"
                )));
            }
        }

        Ok(Self {
            model,
            points,
            rows,
            row_of,
            rank,
        })
    }

    /// Numerical rank of the covariance matrix at [`FACTOR_TOLERANCE`].
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    /// Covariance implied by the factor, `(L L^T)[i, j]`.
    pub fn factored_covariance(&self, i: usize, j: usize) -> f64 {
        self.rows[self.row_of[i]].iter().zip(&self.rows[self.row_of[j]]).map(|(a, b)| a * b).sum()
    }
}

impl GaussianDraw for PointSampler {
    fn locations(&self) -> Locations {
        Locations::Points(self.points.clone())
    }

    fn draw(&self, seed: u64) -> Vec<f64> {
        let mut rng = seed::rng_from_seed(seed);
        let z: Vec<f64> = (0..self.rank).map(|_| StandardNormal.sample(&mut rng)).collect();
        let unique: Vec<f64> = self
            .rows
            .iter()
            .map(|row| row.iter().zip(&z).map(|(a, b)| a * b).sum())
            .collect();
        self.row_of.iter().map(|&r| unique[r]).collect()
    }

    fn tag(&self) -> String {
        format!("{}/pivoted-cholesky(rank={})/{}", self.model.tag(), self.rank, seed::RNG_NAME)
    }
}
