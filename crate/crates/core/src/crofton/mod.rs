//! Integral-geometry oracles.
//!
//! Crofton's formula recovers the `(d-1)`-measure of a hypersurface `M` from
//! the number of points in which random lines meet it:
//! `sigma_{d-1}(M) = (beta_d / 2) * E_s[ int sigma_0(M ∩ l_{s,v}) dv ]`
//! with `s` uniform on the sphere and `v` ranging over `s`'s orthogonal
//! hyperplane.

mod level;
mod quadrature;

pub use level::{extract_level_polyline_2d, l1_weighted_length, LevelPolyline, LevelSegment};
pub use quadrature::{gauss_legendre, sphere_l1_average};

use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field_models::beta_d;
use crate::geometry::{dot, norm2};
use crate::seed::{self, Rng};

/// Lines per independently seeded chunk.
const LINE_CHUNK: usize = 4096;

/// The line `{v + t s : t in R}` with `|s| = 1` and `<s, v> = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamLine {
    pub direction: Vec<f64>,
    pub offset: Vec<f64>,
}

impl ParamLine {
    /// Normalizes `direction` and projects `offset` onto its complement.
    pub fn new(direction: Vec<f64>, offset: Vec<f64>) -> Result<Self> {
        if direction.len() != offset.len() || direction.is_empty() {
            return Err(Error::Contract("line direction and offset must share a dimension >= 1".into()));
        }
        let n = norm2(&direction);
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::Domain("line direction must be a nonzero finite vector".into()));
        }
        let s: Vec<f64> = direction.iter().map(|x| x / n).collect();
        let along = dot(&s, &offset);
        let v = offset.iter().zip(&s).map(|(o, si)| o - along * si).collect();
        Ok(Self { direction: s, offset: v })
    }

    pub fn dim(&self) -> usize {
        self.direction.len()
    }

    pub fn point(&self, t: f64) -> Vec<f64> {
        self.offset.iter().zip(&self.direction).map(|(v, s)| v + t * s).collect()
    }
}

/// Counts `sigma_0(M ∩ l)` for a fixed shape `M`.
pub trait LineOracle: Sync {
    fn dim(&self) -> usize;
    fn count(&self, line: &ParamLine) -> usize;
}

/// Sphere `{x : |x - center| = radius}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sphere {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl LineOracle for Sphere {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn count(&self, line: &ParamLine) -> usize {
        let w: Vec<f64> = line.offset.iter().zip(&self.center).map(|(v, c)| v - c).collect();
        let b = dot(&line.direction, &w);
        let disc = b * b - (dot(&w, &w) - self.radius * self.radius);
        match disc.partial_cmp(&0.0) {
            Some(std::cmp::Ordering::Greater) => 2,
            Some(std::cmp::Ordering::Equal) => 1,
            _ => 0,
        }
    }
}

/// Union of planar segments; a line through a shared endpoint counts once.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentSet {
    pub segments: Vec<([f64; 2], [f64; 2])>,
}

impl SegmentSet {
    /// Boundary of the closed polygon with the given vertices.
    pub fn polygon(vertices: &[[f64; 2]]) -> Self {
        let n = vertices.len();
        Self {
            segments: (0..n).map(|i| (vertices[i], vertices[(i + 1) % n])).collect(),
        }
    }

    /// Boundary of the axis-aligned square `[-a/2, a/2]^2`.
    pub fn square(side: f64) -> Self {
        let h = side / 2.0;
        Self::polygon(&[[-h, -h], [h, -h], [h, h], [-h, h]])
    }
}

impl LineOracle for SegmentSet {
    fn dim(&self) -> usize {
        2
    }

    fn count(&self, line: &ParamLine) -> usize {
        let n = [-line.direction[1], line.direction[0]];
        let side = |p: &[f64; 2]| (p[0] - line.offset[0]) * n[0] + (p[1] - line.offset[1]) * n[1] > 0.0;
        self.segments.iter().filter(|(a, b)| side(a) != side(b)).count()
    }
}

/// A shape no line meets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmptyShape {
    pub d: usize,
}

impl LineOracle for EmptyShape {
    fn dim(&self) -> usize {
        self.d
    }

    fn count(&self, _line: &ParamLine) -> usize {
        0
    }
}

/// Crofton Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CroftonEstimate {
    pub d: usize,
    pub n_lines: usize,
    pub bounding_radius: f64,
    pub measure: f64,
    pub stderr: f64,
}

/// `pi^{k/2} / Gamma(k/2 + 1)`, the volume of the unit `k`-ball.
pub fn unit_ball_volume(k: usize) -> f64 {
    let h = k as f64 / 2.0;
    std::f64::consts::PI.powf(h) / statrs::function::gamma::gamma(h + 1.0)
}

fn unit_vector(d: usize, rng: &mut Rng) -> Vec<f64> {
    loop {
        let g: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
        let n = norm2(&g);
        if n > 1e-300 {
            return g.into_iter().map(|x| x / n).collect();
        }
    }
}

/// Orthonormal basis of the complement of the unit vector `s`.
fn complement_basis(s: &[f64]) -> Vec<Vec<f64>> {
    let d = s.len();
    let mut basis: Vec<Vec<f64>> = vec![s.to_vec()];
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| s[a].abs().total_cmp(&s[b].abs()));
    for &axis in &order {
        if basis.len() == d {
            break;
        }
        let mut e = vec![0.0; d];
        e[axis] = 1.0;
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&e, b);
                e.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let n = norm2(&e);
        if n > 1e-8 {
            basis.push(e.into_iter().map(|x| x / n).collect());
        }
    }
    basis.remove(0);
    basis
}

/// Uniform random line meeting the ball of radius `r` about the origin.
fn random_line(d: usize, r: f64, rng: &mut Rng) -> ParamLine {
    let s = unit_vector(d, rng);
    let mut v = vec![0.0; d];
    if d > 1 {
        let k = d - 1;
        let dir = unit_vector(k, rng);
        let rho = r * rng.random::<f64>().powf(1.0 / k as f64);
        for (b, c) in complement_basis(&s).iter().zip(dir) {
            v.iter_mut().zip(b).for_each(|(x, y)| *x += rho * c * y);
        }
    }
    ParamLine { direction: s, offset: v }
}

/// Crofton estimate of `sigma_{d-1}(M)` from `n_lines` random lines meeting
/// the ball of radius `bounding_radius`, which must contain `M`.
///
/// Chunks of lines use seeds `mix(seed, chunk)`, so the result does not
/// depend on the thread count.
pub fn crofton_measure_mc<O: LineOracle + ?Sized>(
    shape: &O,
    n_lines: usize,
    bounding_radius: f64,
    seed: u64,
) -> Result<CroftonEstimate> {
    if n_lines == 0 {
        return Err(Error::Contract("Crofton estimate needs n_lines > 0".into()));
    }
    if !(bounding_radius > 0.0 && bounding_radius.is_finite()) {
        return Err(Error::Domain(format!("bounding radius must be positive, got {bounding_radius}")));
    }
    let d = shape.dim();
    let scale = beta_d(d)? / 2.0 * unit_ball_volume(d - 1) * bounding_radius.powi(d as i32 - 1);
    let chunks = n_lines.div_ceil(LINE_CHUNK);
    let partial: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = seed::rng_from_seed(seed::mix(seed, c as u64));
            let len = LINE_CHUNK.min(n_lines - c * LINE_CHUNK);
            let (mut s1, mut s2) = (0.0, 0.0);
            for _ in 0..len {
                let k = shape.count(&random_line(d, bounding_radius, &mut rng)) as f64;
                s1 += k;
                s2 += k * k;
            }
            (s1, s2)
        })
        .collect();
    let (s1, s2) = partial.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let n = n_lines as f64;
    let m = s1 / n;
    let var = if n_lines > 1 { ((s2 - n * m * m) / (n - 1.0)).max(0.0) } else { 0.0 };
    Ok(CroftonEstimate {
        d,
        n_lines,
        bounding_radius,
        measure: scale * m,
        stderr: scale * (var / n).sqrt(),
    })
}
