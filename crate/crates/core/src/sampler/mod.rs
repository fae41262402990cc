//! Random field and point process samplers.
//!
//! Every sampler is a pure function of its inputs and a `u64` seed. Grid
//! draws use circulant embedding, point-cloud draws a dense factorization of
//! the covariance matrix, and chi-square fields are sums of squares of
//! independent Gaussian draws with counter-derived sub-seeds.

mod circulant;
mod points;
mod poisson;

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use circulant::{CirculantSampler, MAX_PADDING, MAX_TORUS_NODES};
pub use points::{PointSampler, DEFAULT_POINT_CAP, FACTOR_TOLERANCE};
pub use poisson::sample_poisson_process;

use crate::error::{Error, Result};
use crate::field_models::{CovarianceModel, FieldFamily};
use crate::geometry::AxisBox;
use crate::seed;

/// The lattice `G(delta, T)` with `T = [-delta N, delta N]^d`.
///
/// Nodes are the reference corners `delta * i` for `i` in `[-N, N-1]^d`,
/// stored row-major with the last axis fastest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub d: usize,
    pub half_extent: usize,
    pub spacing: f64,
}

impl GridSpec {
    pub fn new(d: usize, half_extent: usize, spacing: f64) -> Result<Self> {
        if d == 0 {
            return Err(Error::Domain("grid dimension must be >= 1".into()));
        }
        if half_extent == 0 {
            return Err(Error::Domain("grid half extent must be >= 1".into()));
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::Domain(format!("grid spacing must be positive, got {spacing}")));
        }
        Ok(Self {
            d,
            half_extent,
            spacing,
        })
    }

    /// Grid covering `[-half_width, half_width]^d` at spacing `delta`;
    /// `half_width / delta` must be an integer (to 1e-9).
    pub fn for_window(d: usize, half_width: f64, delta: f64) -> Result<Self> {
        let n = half_width / delta;
        let rounded = n.round();
        if !(rounded >= 1.0) || (n - rounded).abs() > 1e-9 * n.max(1.0) {
            return Err(Error::Domain(format!(
                "window half-width {half_width} is not a positive integer multiple of delta {delta}"
            )));
        }
        Self::new(d, rounded as usize, delta)
    }

    /// Nodes per axis, `2N`.
    pub fn side(&self) -> usize {
        2 * self.half_extent
    }

    pub fn node_count(&self) -> usize {
        self.side().pow(self.d as u32)
    }

    /// `sigma_d(T) = (2 N delta)^d`.
    pub fn window_volume(&self) -> f64 {
        (2.0 * self.half_extent as f64 * self.spacing).powi(self.d as i32)
    }

    pub fn window(&self) -> AxisBox {
        AxisBox::centered_cube(self.d, self.half_extent as f64 * self.spacing)
    }

    /// Linear stride of `axis`.
    pub fn stride(&self, axis: usize) -> usize {
        self.side().pow((self.d - 1 - axis) as u32)
    }

    /// Lattice index `i` (each component in `[-N, N-1]`) of a linear node id.
    pub fn lattice_index(&self, mut linear: usize) -> Vec<i64> {
        let side = self.side();
        let mut out = vec![0i64; self.d];
        for axis in (0..self.d).rev() {
            out[axis] = (linear % side) as i64 - self.half_extent as i64;
            linear /= side;
        }
        out
    }

    pub fn linear_index(&self, lattice: &[i64]) -> usize {
        let side = self.side() as i64;
        lattice
            .iter()
            .fold(0i64, |acc, &i| acc * side + (i + self.half_extent as i64)) as usize
    }

    pub fn node_position(&self, linear: usize) -> Vec<f64> {
        self.lattice_index(linear)
            .into_iter()
            .map(|i| i as f64 * self.spacing)
            .collect()
    }

    /// Subgrid keeping every `factor`-th node on each axis, starting from
    /// the lower corner. Requires `factor` to divide `N`.
    pub fn coarsen(&self, factor: usize) -> Result<Self> {
        if factor == 0 || self.half_extent % factor != 0 {
            return Err(Error::Contract(format!(
                "coarsening factor {factor} must divide half extent {}",
                self.half_extent
            )));
        }
        Self::new(self.d, self.half_extent / factor, self.spacing * factor as f64)
    }
}

/// Where a field was observed.
#[derive(Debug, Clone, PartialEq)]
pub enum Locations {
    Grid(GridSpec),
    Points(Vec<Vec<f64>>),
}

impl Locations {
    pub fn len(&self) -> usize {
        match self {
            Locations::Grid(g) => g.node_count(),
            Locations::Points(p) => p.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        match self {
            Locations::Grid(g) => g.d,
            Locations::Points(p) => p.first().map_or(0, Vec::len),
        }
    }

    pub fn position(&self, i: usize) -> Vec<f64> {
        match self {
            Locations::Grid(g) => g.node_position(i),
            Locations::Points(p) => p[i].clone(),
        }
    }
}

/// Field values attached to their sample locations.
#[derive(Debug, Clone)]
pub struct FieldSample {
    pub locations: Locations,
    pub values: Vec<f64>,
    pub seed: u64,
    pub model_tag: String,
}

impl FieldSample {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Writes `x1,...,xd,value` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let d = self.locations.dim();
        let header: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
        writeln!(w, "{},value", header.join(","))?;
        for (i, v) in self.values.iter().enumerate() {
            let pos = self.locations.position(i);
            for x in pos {
                write!(w, "{x:.17e},")?;
            }
            writeln!(w, "{v:.17e}")?;
        }
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_csv(f)
    }

    /// Restriction of a grid sample to [`GridSpec::coarsen`]`(factor)`.
    pub fn coarsen(&self, factor: usize) -> Result<FieldSample> {
        let Locations::Grid(fine) = &self.locations else {
            return Err(Error::Contract("only grid samples can be coarsened".into()));
        };
        let coarse = fine.coarsen(factor)?;
        let values = (0..coarse.node_count())
            .map(|lin| {
                let idx: Vec<i64> = coarse
                    .lattice_index(lin)
                    .into_iter()
                    .map(|i| (i + coarse.half_extent as i64) * factor as i64 - fine.half_extent as i64)
                    .collect();
                self.values[fine.linear_index(&idx)]
            })
            .collect();
        Ok(FieldSample {
            locations: Locations::Grid(coarse),
            values,
            seed: self.seed,
            model_tag: self.model_tag.clone(),
        })
    }
}

/// A source of zero-mean unit-variance Gaussian draws at fixed locations.
pub trait GaussianDraw: Sync {
    fn locations(&self) -> Locations;
    fn draw(&self, seed: u64) -> Vec<f64>;
    fn tag(&self) -> String;
}

/// Draws a field of the given marginal family. Gaussian draws use `seed`
/// directly; chi-square component `c` uses `seed::mix(seed, c)`.
pub fn draw_family<S: GaussianDraw + ?Sized>(sampler: &S, family: FieldFamily, seed: u64) -> Vec<f64> {
    match family {
        FieldFamily::Gaussian => sampler.draw(seed),
        FieldFamily::ChiSquare { k } => {
            let mut acc = sampler.draw(seed::mix(seed, 0));
            acc.iter_mut().for_each(|x| *x *= *x);
            for c in 1..k {
                let comp = sampler.draw(seed::mix(seed, c as u64));
                acc.iter_mut().zip(comp).for_each(|(a, x)| *a += x * x);
            }
            acc
        }
    }
}

fn sample_with<S: GaussianDraw + ?Sized>(sampler: &S, family: FieldFamily, seed: u64) -> FieldSample {
    FieldSample {
        locations: sampler.locations(),
        values: draw_family(sampler, family, seed),
        seed,
        model_tag: format!("{}/{}", family.tag(), sampler.tag()),
    }
}

/// One draw of the Gaussian field on `grid` via circulant embedding.
pub fn sample_gaussian_grid(model: &CovarianceModel, grid: &GridSpec, seed: u64) -> Result<FieldSample> {
    let s = CirculantSampler::new(*model, *grid)?;
    Ok(sample_with(&s, FieldFamily::Gaussian, seed))
}

/// One exact draw of the Gaussian field at `points`.
pub fn sample_gaussian_points(model: &CovarianceModel, points: &[Vec<f64>], seed: u64) -> Result<FieldSample> {
    let s = PointSampler::new(*model, points.to_vec())?;
    Ok(sample_with(&s, FieldFamily::Gaussian, seed))
}

/// Chi-square field with `k` degrees of freedom at `locations`.
pub fn sample_chi_square(model: &CovarianceModel, k: u32, locations: &Locations, seed: u64) -> Result<FieldSample> {
    if k == 0 {
        return Err(Error::Domain("chi-square degrees of freedom must be >= 1".into()));
    }
    let family = FieldFamily::ChiSquare { k };
    match locations {
        Locations::Grid(g) => Ok(sample_with(&CirculantSampler::new(*model, *g)?, family, seed)),
        Locations::Points(p) => Ok(sample_with(&PointSampler::new(*model, p.clone())?, family, seed)),
    }
}
