use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampler::GridSpec;

/// One piece of a level curve with the unit normal pointing uphill.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelSegment {
    pub a: [f64; 2],
    pub b: [f64; 2],
    pub normal: [f64; 2],
}

impl LevelSegment {
    pub fn length(&self) -> f64 {
        (self.b[0] - self.a[0]).hypot(self.b[1] - self.a[1])
    }
}

/// Piecewise-linear approximation of `{X = u}` on a planar grid.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LevelPolyline {
    pub segments: Vec<LevelSegment>,
    /// Cells whose diagonal corners disagree; resolved by the cell-centre mean.
    pub saddle_cells: usize,
}

impl LevelPolyline {
    pub fn total_length(&self) -> f64 {
        self.segments.iter().map(LevelSegment::length).sum()
    }

    /// Writes `x1,y1,x2,y2,nx,ny` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "x1,y1,x2,y2,nx,ny")?;
        for s in &self.segments {
            writeln!(
                w,
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
                s.a[0], s.a[1], s.b[0], s.b[1], s.normal[0], s.normal[1]
            )?;
        }
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        self.write_csv(std::io::BufWriter::new(std::fs::File::create(path)?))
    }
}

/// `sum length * |n|_1`, the discrete `int |grad X|_1 / |grad X|_2 dsigma_1`.
pub fn l1_weighted_length(p: &LevelPolyline) -> f64 {
    p.segments
        .iter()
        .map(|s| s.length() * (s.normal[0].abs() + s.normal[1].abs()))
        .sum()
}

struct Grid2<'a> {
    values: &'a [f64],
    side: usize,
    h: f64,
    origin: f64,
}

impl Grid2<'_> {
    fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.side + j]
    }

    fn pos(&self, i: usize, j: usize) -> [f64; 2] {
        [self.origin + i as f64 * self.h, self.origin + j as f64 * self.h]
    }

    /// Central differences inside, one-sided at the border.
    fn node_gradient(&self, i: usize, j: usize) -> [f64; 2] {
        let diff = |lo: f64, hi: f64, steps: usize| (hi - lo) / (steps as f64 * self.h);
        let (i0, i1) = (i.saturating_sub(1), (i + 1).min(self.side - 1));
        let (j0, j1) = (j.saturating_sub(1), (j + 1).min(self.side - 1));
        [
            diff(self.at(i0, j), self.at(i1, j), i1 - i0),
            diff(self.at(i, j0), self.at(i, j1), j1 - j0),
        ]
    }

    /// Bilinear interpolation of node gradients within cell `(i, j)`.
    fn gradient(&self, i: usize, j: usize, p: [f64; 2]) -> [f64; 2] {
        let base = self.pos(i, j);
        let s = ((p[0] - base[0]) / self.h).clamp(0.0, 1.0);
        let t = ((p[1] - base[1]) / self.h).clamp(0.0, 1.0);
        let g00 = self.node_gradient(i, j);
        let g10 = self.node_gradient(i + 1, j);
        let g01 = self.node_gradient(i, j + 1);
        let g11 = self.node_gradient(i + 1, j + 1);
        let mut g = [0.0; 2];
        for k in 0..2 {
            g[k] = (1.0 - s) * (1.0 - t) * g00[k] + s * (1.0 - t) * g10[k] + (1.0 - s) * t * g01[k] + s * t * g11[k];
        }
        g
    }
}

/// Marching-squares extraction of `{X = u}` from grid values (`d = 2`).
///
/// Nodes with `X >= u` are inside. Crossing points are linear
/// interpolations along cell edges.
pub fn extract_level_polyline_2d(values: &[f64], grid: &GridSpec, u: f64) -> Result<LevelPolyline> {
    if grid.d != 2 {
        return Err(Error::Unsupported(format!("level extraction needs d = 2, got {}", grid.d)));
    }
    if values.len() != grid.node_count() {
        return Err(Error::Contract(format!(
            "{} values do not fill a {}x{} grid",
            values.len(),
            grid.side(),
            grid.side()
        )));
    }
    let g = Grid2 {
        values,
        side: grid.side(),
        h: grid.spacing,
        origin: -(grid.half_extent as f64) * grid.spacing,
    };
    let mut out = LevelPolyline::default();
    for i in 0..g.side - 1 {
        for j in 0..g.side - 1 {
            // corners counter-clockwise; edge e joins corner e and e + 1
            let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
            let vals = corners.map(|(a, b)| g.at(a, b));
            let inside = vals.map(|v| v >= u);
            let crossing = |e: usize| -> Option<[f64; 2]> {
                let f = (e + 1) % 4;
                if inside[e] == inside[f] {
                    return None;
                }
                let t = (u - vals[e]) / (vals[f] - vals[e]);
                let (pa, pb) = (g.pos(corners[e].0, corners[e].1), g.pos(corners[f].0, corners[f].1));
                Some([pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1])])
            };
            let cuts: Vec<(usize, [f64; 2])> = (0..4).filter_map(|e| crossing(e).map(|p| (e, p))).collect();
            let pairs: Vec<([f64; 2], [f64; 2])> = match cuts.len() {
                2 => vec![(cuts[0].1, cuts[1].1)],
                4 => {
                    out.saddle_cells += 1;
                    let centre_inside = vals.iter().sum::<f64>() / 4.0 >= u;
                    let p: Vec<[f64; 2]> = cuts.iter().map(|c| c.1).collect();
                    if centre_inside == inside[0] {
                        // corners 0 and 2 connect through the centre; cut off 1 and 3
                        vec![(p[0], p[1]), (p[2], p[3])]
                    } else {
                        vec![(p[3], p[0]), (p[1], p[2])]
                    }
                }
                _ => Vec::new(),
            };
            for (a, b) in pairs {
                let len = (b[0] - a[0]).hypot(b[1] - a[1]);
                if !(len > 0.0) {
                    continue;
                }
                let mid = [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0];
                let grad = g.gradient(i, j, mid);
                let gn = grad[0].hypot(grad[1]);
                let normal = if gn > 0.0 && gn.is_finite() {
                    [grad[0] / gn, grad[1] / gn]
                } else {
                    // perpendicular to the segment, toward the inside corner
                    let n = [-(b[1] - a[1]) / len, (b[0] - a[0]) / len];
                    let k = (0..4).find(|&k| inside[k]).unwrap_or(0);
                    let c = g.pos(corners[k].0, corners[k].1);
                    let sgn = ((c[0] - mid[0]) * n[0] + (c[1] - mid[1]) * n[1]).signum();
                    [sgn * n[0], sgn * n[1]]
                };
                out.segments.push(LevelSegment { a, b, normal });
            }
        }
    }
    Ok(out)
}
