//! Point-referenced honeycombs clipped to an observation window.
//!
//! A honeycomb is a tessellation by convex polytopes, each carrying one
//! reference point, such that every shared facet is orthogonal to the
//! difference of the two reference points. The estimators only need, for
//! the cells lying inside the window `T`, the cell volumes, the reference
//! points and the interior facet measures; that is what
//! [`WindowedHoneycomb`] exposes.

mod delaunay;
mod hexagonal;
mod hypercubic;
pub mod polygon;
mod voronoi;

use std::io::Write;
use std::path::Path;

pub use delaunay::Triangulation;
pub use hexagonal::hexagonal_honeycomb;
pub use hypercubic::{hypercubic_honeycomb, MAX_MATERIALIZED_CELLS};
pub use voronoi::{default_guard, voronoi_honeycomb_2d};

use crate::error::{Error, Result};
use crate::geometry::{dist2, dot, norm2, AxisBox};

/// Slack for the vertexwise `P ⊆ T` test.
pub const INSIDE_TOLERANCE: f64 = 1e-12;

/// Angular tolerance of the facet normality check.
pub const NORMALITY_TOLERANCE: f64 = 1e-9;

/// Closed convex cell with its reference point.
#[derive(Debug, Clone)]
pub struct Cell {
    pub reference: Vec<f64>,
    /// In 2D the polygon in counter-clockwise order; in general the vertex set.
    pub vertices: Vec<Vec<f64>>,
    /// `sigma_d(P)`.
    pub volume: f64,
}

/// Shared facet of two adjacent cells.
#[derive(Debug, Clone)]
pub struct Facet {
    pub cell_a: usize,
    pub cell_b: usize,
    /// `sigma_{d-1}(P_a ∩ P_b) > 0`.
    pub measure: f64,
    /// Unit normal pointing from `cell_a` toward `cell_b`.
    pub normal: Vec<f64>,
    pub vertices: Vec<Vec<f64>>,
}

/// Non-fatal events noticed during construction.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Diagnostics {
    /// Generators dropped because they duplicated another within 1e-12.
    pub merged_duplicates: usize,
    /// Inside-cell vertices farther from their generator than from the
    /// guard boundary; such cells may be inexact.
    pub guard_violations: usize,
}

#[derive(Debug, Clone)]
pub struct Honeycomb {
    pub d: usize,
    pub cells: Vec<Cell>,
    pub facets: Vec<Facet>,
    pub window: AxisBox,
    /// `max diam(P ∩ T)` over cells meeting `T`.
    pub diameter_bound: f64,
    pub diagnostics: Diagnostics,
}

impl Honeycomb {
    /// Checks that every facet is orthogonal to its reference difference:
    /// `|<e, ref_b - ref_a>| <= tol * |ref_b - ref_a|` for every unit
    /// direction `e` spanned by the facet vertices. Returns the first
    /// offending facet index.
    pub fn check_normality(&self, tol: f64) -> std::result::Result<(), usize> {
        for (k, f) in self.facets.iter().enumerate() {
            let ra = &self.cells[f.cell_a].reference;
            let rb = &self.cells[f.cell_b].reference;
            let diff: Vec<f64> = rb.iter().zip(ra).map(|(b, a)| b - a).collect();
            let len = norm2(&diff);
            if !(len > 0.0) {
                return Err(k);
            }
            let base = &f.vertices[0];
            for v in &f.vertices[1..] {
                let e: Vec<f64> = v.iter().zip(base).map(|(x, y)| x - y).collect();
                let el = norm2(&e);
                if el == 0.0 {
                    continue;
                }
                if (dot(&e, &diff) / el).abs() > tol * len {
                    return Err(k);
                }
            }
        }
        Ok(())
    }

    /// Writes the facet list as `ax,ay,bx,by,cell_a,cell_b,length` (2D only).
    pub fn write_edge_csv<W: Write>(&self, mut w: W) -> Result<()> {
        if self.d != 2 {
            return Err(Error::Unsupported("edge list export is 2D only".into()));
        }
        writeln!(w, "ax,ay,bx,by,cell_a,cell_b,length")?;
        for f in &self.facets {
            let (a, b) = (&f.vertices[0], &f.vertices[f.vertices.len() - 1]);
            writeln!(
                w,
                "{:.17e},{:.17e},{:.17e},{:.17e},{},{},{:.17e}",
                a[0], a[1], b[0], b[1], f.cell_a, f.cell_b, f.measure
            )?;
        }
        Ok(())
    }

    pub fn save_edge_csv(&self, path: &Path) -> Result<()> {
        self.write_edge_csv(std::io::BufWriter::new(std::fs::File::create(path)?))
    }
}

/// Interior adjacency between two inside cells, by inside-slot index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteriorPair {
    pub slot_a: usize,
    pub slot_b: usize,
    pub measure: f64,
    /// `|ref_b - ref_a|_2`.
    pub distance: f64,
}

/// A honeycomb restricted to the cells lying entirely inside its window.
///
/// Indicators and field values are aligned with `inside_cells`: slot `s`
/// corresponds to cell `inside_cells[s]`.
#[derive(Debug, Clone)]
pub struct WindowedHoneycomb {
    pub honeycomb: Honeycomb,
    pub inside_cells: Vec<usize>,
    pub interior_facets: Vec<usize>,
    pairs: Vec<InteriorPair>,
    covered_volume: f64,
}

impl WindowedHoneycomb {
    pub fn new(honeycomb: Honeycomb) -> Self {
        let window = &honeycomb.window;
        let mut slot_of = vec![usize::MAX; honeycomb.cells.len()];
        let mut inside_cells = Vec::new();
        for (i, c) in honeycomb.cells.iter().enumerate() {
            if c.vertices.iter().all(|v| window.contains(v, INSIDE_TOLERANCE)) {
                slot_of[i] = inside_cells.len();
                inside_cells.push(i);
            }
        }
        let mut interior_facets = Vec::new();
        let mut pairs = Vec::new();
        for (k, f) in honeycomb.facets.iter().enumerate() {
            let (sa, sb) = (slot_of[f.cell_a], slot_of[f.cell_b]);
            if sa != usize::MAX && sb != usize::MAX {
                interior_facets.push(k);
                pairs.push(InteriorPair {
                    slot_a: sa,
                    slot_b: sb,
                    measure: f.measure,
                    distance: dist2(
                        &honeycomb.cells[f.cell_a].reference,
                        &honeycomb.cells[f.cell_b].reference,
                    ),
                });
            }
        }
        let covered_volume = inside_cells.iter().map(|&i| honeycomb.cells[i].volume).sum();
        Self {
            honeycomb,
            inside_cells,
            interior_facets,
            pairs,
            covered_volume,
        }
    }

    pub fn d(&self) -> usize {
        self.honeycomb.d
    }

    pub fn window(&self) -> &AxisBox {
        &self.honeycomb.window
    }

    /// `sigma_d(T)`.
    pub fn window_volume(&self) -> f64 {
        self.honeycomb.window.volume()
    }

    pub fn inside_count(&self) -> usize {
        self.inside_cells.len()
    }

    /// `sigma_d(⋃ P) / sigma_d(T)` over the inside cells.
    pub fn coverage_ratio(&self) -> f64 {
        self.covered_volume / self.window_volume()
    }

    pub fn inside_volume(&self, slot: usize) -> f64 {
        self.honeycomb.cells[self.inside_cells[slot]].volume
    }

    /// Reference points of the inside cells, in slot order.
    pub fn reference_points(&self) -> Vec<Vec<f64>> {
        self.inside_cells
            .iter()
            .map(|&i| self.honeycomb.cells[i].reference.clone())
            .collect()
    }

    /// Each interior adjacency once (unordered).
    pub fn interior_pairs(&self) -> &[InteriorPair] {
        &self.pairs
    }

    pub fn total_interior_facet_measure(&self) -> f64 {
        self.pairs.iter().map(|p| p.measure).sum()
    }

    /// Sum of `sigma_d(P ∩ T)` over all cells (2D polygon cells only).
    pub fn clipped_volume_sum(&self) -> Result<f64> {
        if self.d() != 2 {
            return Err(Error::Unsupported("clipped areas are computed for 2D cells".into()));
        }
        Ok(self
            .honeycomb
            .cells
            .iter()
            .map(|c| polygon::area(&polygon::clip_to_box(&to_2d(&c.vertices), self.window())))
            .sum())
    }
}

/// Sum over ordered interior adjacent pairs of `sigma_{d-1}(Q1 ∩ Q2) |Q2• - Q1•|`.
///
/// Equals `2d` times the volume of the union of the pyramids spanned by each
/// interior facet and its two reference points, so it never exceeds
/// `2d sigma_d(T)` and approaches it as the cells shrink.
pub fn pyramid_identity_sum(h: &WindowedHoneycomb) -> f64 {
    2.0 * h.pairs.iter().map(|p| p.measure * p.distance).sum::<f64>()
}

pub(crate) fn to_2d(v: &[Vec<f64>]) -> Vec<[f64; 2]> {
    v.iter().map(|p| [p[0], p[1]]).collect()
}

pub(crate) fn diameter(vertices: &[Vec<f64>]) -> f64 {
    let mut best: f64 = 0.0;
    for (i, a) in vertices.iter().enumerate() {
        for b in &vertices[i + 1..] {
            best = best.max(dist2(a, b));
        }
    }
    best
}
