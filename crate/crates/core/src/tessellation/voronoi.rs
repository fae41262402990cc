use super::delaunay::{all_collinear, Triangulation};
use super::polygon::{self, P2};
use super::{to_2d, Cell, Diagnostics, Facet, Honeycomb, WindowedHoneycomb};
use crate::error::{Error, Result};
use crate::geometry::AxisBox;

const DUPLICATE_TOLERANCE: f64 = 1e-12;

/// Default guard margin for generators drawn at intensity `rate`: three
/// times the mean nearest-neighbour distance `1 / (2 sqrt(rate))` of a
/// planar Poisson process.
pub fn default_guard(rate: f64) -> f64 {
    1.5 / rate.sqrt()
}

/// Voronoi honeycomb of `points` clipped to `window ⊕ guard`, referenced by
/// the generators.
///
/// Cells are intersections of the guard box with the bisector half-planes of
/// each generator's Delaunay neighbours. Generators outside the guard box
/// take part in the triangulation but get no cell. Generators closer than
/// 1e-12 to an earlier one are merged and counted in the diagnostics. With
/// `guard = 0` the cells are clipped to the window itself.
pub fn voronoi_honeycomb_2d(points: &[Vec<f64>], window: &AxisBox, guard: f64) -> Result<WindowedHoneycomb> {
    if window.dim() != 2 {
        return Err(Error::Unsupported("Voronoi honeycombs are built in 2D only".into()));
    }
    if !(guard >= 0.0 && guard.is_finite()) {
        return Err(Error::Domain(format!("guard margin must be finite and >= 0, got {guard}")));
    }
    if points.iter().any(|p| p.len() != 2) {
        return Err(Error::Construction("generators must be 2-vectors".into()));
    }

    // Merge near-duplicates, keeping the first occurrence in input order.
    let raw: Vec<P2> = points.iter().map(|p| [p[0], p[1]]).collect();
    let mut order: Vec<usize> = (0..raw.len()).collect();
    order.sort_by(|&a, &b| raw[a][0].total_cmp(&raw[b][0]).then(raw[a][1].total_cmp(&raw[b][1])).then(a.cmp(&b)));
    let mut dropped = vec![false; raw.len()];
    for (pos, &i) in order.iter().enumerate() {
        if dropped[i] {
            continue;
        }
        for &j in &order[pos + 1..] {
            if raw[j][0] - raw[i][0] > DUPLICATE_TOLERANCE {
                break;
            }
            if !dropped[j] && (raw[j][1] - raw[i][1]).abs() <= DUPLICATE_TOLERANCE {
                let (keep, drop) = if i < j { (i, j) } else { (j, i) };
                if !dropped[keep] {
                    dropped[drop] = true;
                }
            }
        }
    }
    let merged_duplicates = dropped.iter().filter(|&&x| x).count();
    if merged_duplicates > 0 {
        log::warn!("merged {merged_duplicates} duplicate Voronoi generators");
    }
    let gens: Vec<P2> = raw.iter().zip(&dropped).filter(|(_, &d)| !d).map(|(p, _)| *p).collect();
    if gens.len() < 2 {
        return Err(Error::Construction(format!(
            "need at least 2 distinct generators, got {}",
            gens.len()
        )));
    }

    let neighbors = if all_collinear(&gens) {
        collinear_neighbors(&gens)
    } else {
        Triangulation::new(&gens)?.neighbors()
    };

    let guard_box = window.inflate(guard);
    let frame = polygon::box_polygon(&guard_box);
    let mut cell_of = vec![usize::MAX; gens.len()];
    let mut cells = Vec::new();
    let mut labelled: Vec<(Vec<P2>, Vec<Option<usize>>)> = Vec::new();
    for (g, &p) in gens.iter().enumerate() {
        if !guard_box.contains(&p, 0.0) {
            continue;
        }
        let mut poly = frame.clone();
        let mut labels: Vec<Option<usize>> = vec![None; 4];
        for &nb in &neighbors[g] {
            let q = gens[nb];
            let mid = [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])];
            let normal = [q[0] - p[0], q[1] - p[1]];
            (poly, labels) = polygon::clip_halfplane(&poly, &labels, mid, normal, Some(nb));
        }
        cell_of[g] = cells.len();
        cells.push(Cell {
            reference: p.to_vec(),
            vertices: poly.iter().map(|v| v.to_vec()).collect(),
            volume: polygon::area(&poly),
        });
        labelled.push((poly, labels));
    }

    let scale = guard_box.side(0).max(guard_box.side(1));
    let mut facets = Vec::new();
    for (g, &ci) in cell_of.iter().enumerate() {
        if ci == usize::MAX {
            continue;
        }
        let (poly, labels) = &labelled[ci];
        for k in 0..poly.len() {
            let Some(nb) = labels[k] else { continue };
            if nb < g || cell_of[nb] == usize::MAX {
                continue;
            }
            let (a, b) = (poly[k], poly[(k + 1) % poly.len()]);
            let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
            if len <= DUPLICATE_TOLERANCE * scale {
                continue;
            }
            let (p, q) = (gens[g], gens[nb]);
            let dist = ((q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2)).sqrt();
            facets.push(Facet {
                cell_a: ci,
                cell_b: cell_of[nb],
                measure: len,
                normal: vec![(q[0] - p[0]) / dist, (q[1] - p[1]) / dist],
                vertices: vec![a.to_vec(), b.to_vec()],
            });
        }
    }

    let mut diameter_bound: f64 = 0.0;
    for c in &cells {
        let clipped = polygon::clip_to_box(&to_2d(&c.vertices), window);
        let as_vec: Vec<Vec<f64>> = clipped.iter().map(|v| v.to_vec()).collect();
        diameter_bound = diameter_bound.max(super::diameter(&as_vec));
    }

    let honeycomb = Honeycomb {
        d: 2,
        cells,
        facets,
        window: window.clone(),
        diameter_bound,
        diagnostics: Diagnostics {
            merged_duplicates,
            guard_violations: 0,
        },
    };
    let mut windowed = WindowedHoneycomb::new(honeycomb);

    // A cell is exact when each of its vertices is closer to its generator
    // than to the region beyond the guard box, where generators may be missing.
    let mut violations = 0;
    for &ci in &windowed.inside_cells {
        let cell = &windowed.honeycomb.cells[ci];
        let r = &cell.reference;
        for v in &cell.vertices {
            let to_edge = (0..2)
                .map(|a| (v[a] - guard_box.lo[a]).min(guard_box.hi[a] - v[a]))
                .fold(f64::INFINITY, f64::min);
            let to_gen = ((v[0] - r[0]).powi(2) + (v[1] - r[1]).powi(2)).sqrt();
            if to_edge > DUPLICATE_TOLERANCE * scale && to_gen > to_edge {
                violations += 1;
                break;
            }
        }
    }
    windowed.honeycomb.diagnostics.guard_violations = violations;
    Ok(windowed)
}

/// Neighbours along the line for a collinear generator set.
fn collinear_neighbors(gens: &[P2]) -> Vec<Vec<usize>> {
    let a = gens[0];
    let b = *gens.iter().find(|p| **p != a).expect("at least two distinct generators");
    let dir = [b[0] - a[0], b[1] - a[1]];
    let mut order: Vec<usize> = (0..gens.len()).collect();
    let t = |i: usize| (gens[i][0] - a[0]) * dir[0] + (gens[i][1] - a[1]) * dir[1];
    order.sort_by(|&i, &j| t(i).total_cmp(&t(j)));
    let mut adj = vec![Vec::new(); gens.len()];
    for w in order.windows(2) {
        adj[w[0]].push(w[1]);
        adj[w[1]].push(w[0]);
    }
    adj
}
