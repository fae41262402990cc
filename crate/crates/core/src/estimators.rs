//! Volume and surface-area density estimators on windowed honeycombs.
//!
//! Only the excursion indicator at the reference points is used:
//!
//! * volume: `(1/sigma_d(T)) sum_P sigma_d(P) 1{X(P•) >= u}`
//! * surface: `(1/sigma_d(T)) sum_{P1 != P2} sigma_{d-1}(P1 ∩ P2) 1{X(P1•) <= u < X(P2•)}`
//!
//! The raw surface estimate converges to `(2d/beta_d) C*_{d-1}(u)` as the
//! cells shrink; [`corrected_surface`] divides that factor out. Both sums are
//! normalized by `sigma_d(T)`, not by the covered volume; the coverage ratio
//! is reported alongside.

use std::io::Write;

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field_models::{beta_d, CovarianceModel};
use crate::sampler::{FieldSample, GridSpec, Locations};
use crate::seed::{self, Rng};
use crate::tessellation::WindowedHoneycomb;

/// Which reference points lie in the excursion set `{X >= u}`.
///
/// A value exactly at the level counts as an exceedance.
#[derive(Debug, Clone, PartialEq)]
pub struct ExcursionIndicator {
    pub exceeds: Vec<bool>,
    pub level: f64,
    pub source: String,
}

impl ExcursionIndicator {
    pub fn from_values(values: &[f64], level: f64, source: impl Into<String>) -> Self {
        Self {
            exceeds: values.iter().map(|&v| v >= level).collect(),
            level,
            source: source.into(),
        }
    }

    pub fn from_sample(sample: &FieldSample, level: f64) -> Self {
        Self::from_values(&sample.values, level, format!("{}#seed={}", sample.model_tag, sample.seed))
    }

    /// Every indicator flipped.
    pub fn complement(&self) -> Self {
        Self {
            exceeds: self.exceeds.iter().map(|b| !b).collect(),
            level: self.level,
            source: format!("not({})", self.source),
        }
    }

    pub fn len(&self) -> usize {
        self.exceeds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exceeds.is_empty()
    }
}

fn check_aligned(h: &WindowedHoneycomb, ind: &ExcursionIndicator) -> Result<()> {
    if ind.len() != h.inside_count() {
        return Err(Error::Contract(format!(
            "indicator has {} entries but the honeycomb has {} inside cells",
            ind.len(),
            h.inside_count()
        )));
    }
    Ok(())
}

/// Volume density estimate `C^_d(u)`.
pub fn volume_estimate(h: &WindowedHoneycomb, ind: &ExcursionIndicator) -> Result<f64> {
    check_aligned(h, ind)?;
    let mut acc = 0.0;
    for (slot, &e) in ind.exceeds.iter().enumerate() {
        if e {
            acc += h.inside_volume(slot);
        }
    }
    Ok(acc / h.window_volume())
}

/// Raw surface density estimate `C^_{d-1}(u)`.
///
/// Of the two orderings of an adjacent pair at most one satisfies
/// `X(P1•) < u <= X(P2•)`, so each interior facet whose cells disagree
/// contributes its measure once.
pub fn surface_estimate(h: &WindowedHoneycomb, ind: &ExcursionIndicator) -> Result<f64> {
    check_aligned(h, ind)?;
    let mut acc = 0.0;
    for p in h.interior_pairs() {
        if ind.exceeds[p.slot_a] != ind.exceeds[p.slot_b] {
            acc += p.measure;
        }
    }
    Ok(acc / h.window_volume())
}

/// `raw * beta_d / (2d)`.
pub fn corrected_surface(raw: f64, d: usize) -> Result<f64> {
    if !(raw >= 0.0) {
        return Err(Error::Contract(format!("raw surface estimate must be >= 0, got {raw}")));
    }
    if d < 2 {
        return Err(Error::Domain(format!("surface correction needs d >= 2, got {d}")));
    }
    Ok(raw * beta_d(d)? / (2.0 * d as f64))
}

/// Volume and surface estimates with their normalization metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub d: usize,
    /// Lattice spacing, or the cell diameter bound for irregular honeycombs.
    pub delta: f64,
    pub u: f64,
    pub volume_density: f64,
    pub surface_raw: f64,
    pub surface_corrected: f64,
    pub window_volume: f64,
    pub coverage_ratio: f64,
}

impl EstimateReport {
    pub const CSV_HEADER: &'static str = "d,delta,u,volume,surface_raw,surface_corrected,coverage";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            self.d,
            self.delta,
            self.u,
            self.volume_density,
            self.surface_raw,
            self.surface_corrected,
            self.coverage_ratio
        )
    }

    pub fn write_csv<W: Write>(reports: &[EstimateReport], mut w: W) -> Result<()> {
        writeln!(w, "{}", Self::CSV_HEADER)?;
        for r in reports {
            writeln!(w, "{}", r.csv_row())?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

/// Both estimates on a general honeycomb.
pub fn estimate(h: &WindowedHoneycomb, ind: &ExcursionIndicator) -> Result<EstimateReport> {
    let surface_raw = surface_estimate(h, ind)?;
    Ok(EstimateReport {
        d: h.d(),
        delta: h.honeycomb.diameter_bound,
        u: ind.level,
        volume_density: volume_estimate(h, ind)?,
        surface_raw,
        surface_corrected: corrected_surface(surface_raw, h.d())?,
        window_volume: h.window_volume(),
        coverage_ratio: h.coverage_ratio(),
    })
}

fn check_grid_values(values: &[f64], grid: &GridSpec) -> Result<()> {
    if values.len() != grid.node_count() {
        return Err(Error::Contract(format!(
            "{} values do not fill a ({})^{} lattice",
            values.len(),
            grid.side(),
            grid.d
        )));
    }
    Ok(())
}

/// Surface estimate on the hypercubic lattice straight from grid values:
/// `(delta^{d-1}/sigma_d(T)) sum_j sum_t |1{X(t) >= u} - 1{X(t + delta e_j) >= u}|`.
///
/// Agrees exactly with [`surface_estimate`] on the materialized lattice.
pub fn hypercubic_surface_fast(values: &[f64], grid: &GridSpec, u: f64) -> Result<f64> {
    check_grid_values(values, grid)?;
    let exceeds: Vec<bool> = values.iter().map(|&v| v >= u).collect();
    let measure = grid.spacing.powi(grid.d as i32 - 1);
    let side = grid.side();
    let mut acc = 0.0;
    for axis in 0..grid.d {
        let stride = grid.stride(axis);
        let block = stride * side;
        for start in (0..exceeds.len()).step_by(block) {
            let lower = &exceeds[start..start + block - stride];
            let upper = &exceeds[start + stride..start + block];
            for (a, b) in lower.iter().zip(upper) {
                if a != b {
                    acc += measure;
                }
            }
        }
    }
    Ok(acc / grid.window().volume())
}

/// Volume estimate on the hypercubic lattice from grid values.
pub fn hypercubic_volume_fast(values: &[f64], grid: &GridSpec, u: f64) -> Result<f64> {
    check_grid_values(values, grid)?;
    let cell = grid.spacing.powi(grid.d as i32);
    let mut acc = 0.0;
    for &v in values {
        if v >= u {
            acc += cell;
        }
    }
    Ok(acc / grid.window().volume())
}

/// Both estimates for a grid sample.
pub fn hypercubic_estimate(sample: &FieldSample, u: f64) -> Result<EstimateReport> {
    let Locations::Grid(grid) = &sample.locations else {
        return Err(Error::Contract("hypercubic estimates need a grid sample".into()));
    };
    let surface_raw = hypercubic_surface_fast(&sample.values, grid, u)?;
    Ok(EstimateReport {
        d: grid.d,
        delta: grid.spacing,
        u,
        volume_density: hypercubic_volume_fast(&sample.values, grid, u)?,
        surface_raw,
        surface_corrected: corrected_surface(surface_raw, grid.d)?,
        window_volume: grid.window().volume(),
        coverage_ratio: 1.0,
    })
}

/// Draws `(X(0), X(q e_1))` from a stationary field.
pub trait PairSampler: Sync {
    fn sample_pair(&self, q: f64, rng: &mut Rng) -> (f64, f64);
}

/// Bivariate normal pairs with correlation `r(q)`.
#[derive(Debug, Clone, Copy)]
pub struct GaussianPairs {
    pub model: CovarianceModel,
}

impl PairSampler for GaussianPairs {
    fn sample_pair(&self, q: f64, rng: &mut Rng) -> (f64, f64) {
        let rho = self.model.at_distance(q);
        let a: f64 = StandardNormal.sample(rng);
        let b: f64 = StandardNormal.sample(rng);
        (a, rho * a + (1.0 - rho * rho).max(0.0).sqrt() * b)
    }
}

/// Pairs of a chi-square field with `k` degrees of freedom.
#[derive(Debug, Clone, Copy)]
pub struct ChiSquarePairs {
    pub model: CovarianceModel,
    pub k: u32,
}

impl PairSampler for ChiSquarePairs {
    fn sample_pair(&self, q: f64, rng: &mut Rng) -> (f64, f64) {
        let g = GaussianPairs { model: self.model };
        (0..self.k).fold((0.0, 0.0), |(s0, s1), _| {
            let (a, b) = g.sample_pair(q, rng);
            (s0 + a * a, s1 + b * b)
        })
    }
}

/// Result of the crossing-probability estimator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossingEstimate {
    pub q: f64,
    pub n_pairs: usize,
    /// Frequency of `X(0) <= u < X(q e_1)`.
    pub p_hat: f64,
    /// `beta_d p_hat / q`.
    pub surface_first_order: f64,
    /// Binomial standard error of `surface_first_order`.
    pub stderr: f64,
}

/// First-order surface density from up-crossing frequencies at lag `q`.
///
/// `P(X(0) <= u < X(q e_1)) / q` increases to `C*_{d-1}(u) / beta_d` as
/// `q -> 0`, so `beta_d p_hat / q` approaches the surface density from below.
pub fn crossing_rate_surface<S: PairSampler + ?Sized>(
    sampler: &S,
    u: f64,
    q: f64,
    d: usize,
    n_pairs: usize,
    seed: u64,
) -> Result<CrossingEstimate> {
    if n_pairs == 0 {
        return Err(Error::Contract("crossing estimator needs n_pairs > 0".into()));
    }
    if !(q > 0.0 && q.is_finite()) {
        return Err(Error::Domain(format!("lag q must be positive, got {q}")));
    }
    let beta = beta_d(d)?;
    let mut rng = seed::rng_from_seed(seed);
    let mut hits = 0usize;
    for _ in 0..n_pairs {
        let (x0, xq) = sampler.sample_pair(q, &mut rng);
        if x0 <= u && u < xq {
            hits += 1;
        }
    }
    let p_hat = hits as f64 / n_pairs as f64;
    let se_p = (p_hat * (1.0 - p_hat) / n_pairs as f64).sqrt();
    Ok(CrossingEstimate {
        q,
        n_pairs,
        p_hat,
        surface_first_order: beta * p_hat / q,
        stderr: beta * se_p / q,
    })
}
