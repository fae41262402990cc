use std::collections::HashMap;

use super::{polygon, to_2d, Cell, Diagnostics, Facet, Honeycomb, WindowedHoneycomb};
use crate::error::{Error, Result};
use crate::geometry::AxisBox;

const NEIGHBOR_STEPS: [(i64, i64); 3] = [(1, 0), (0, 1), (-1, 1)];

/// Regular hexagonal honeycomb with circumradius `delta`, referenced by the
/// hexagon centers. Hexagons are pointy-top with centers on the axial
/// lattice `(sqrt(3) delta (q + r/2), 1.5 delta r)`; every hexagon meeting
/// `window` is kept.
pub fn hexagonal_honeycomb(delta: f64, window: &AxisBox) -> Result<WindowedHoneycomb> {
    if window.dim() != 2 {
        return Err(Error::Domain("hexagonal honeycomb is two-dimensional".into()));
    }
    if !(delta > 0.0 && delta < window.side(0).min(window.side(1))) {
        return Err(Error::Domain(format!(
            "circumradius {delta} must be positive and below the window's smaller side"
        )));
    }
    let sqrt3 = 3f64.sqrt();
    let center = |q: i64, r: i64| [sqrt3 * delta * (q as f64 + 0.5 * r as f64), 1.5 * delta * r as f64];

    let r_lo = ((window.lo[1] - delta) / (1.5 * delta)).floor() as i64;
    let r_hi = ((window.hi[1] + delta) / (1.5 * delta)).ceil() as i64;
    let mut cells = Vec::new();
    let mut index = HashMap::new();
    for r in r_lo..=r_hi {
        let shift = 0.5 * r as f64;
        let q_lo = ((window.lo[0] - delta) / (sqrt3 * delta) - shift).floor() as i64;
        let q_hi = ((window.hi[0] + delta) / (sqrt3 * delta) - shift).ceil() as i64;
        for q in q_lo..=q_hi {
            let c = center(q, r);
            let vertices: Vec<[f64; 2]> = (0..6)
                .map(|k| {
                    let ang = std::f64::consts::PI / 6.0 + k as f64 * std::f64::consts::PI / 3.0;
                    [c[0] + delta * ang.cos(), c[1] + delta * ang.sin()]
                })
                .collect();
            if polygon::clip_to_box(&vertices, window).len() < 3 {
                continue;
            }
            index.insert((q, r), cells.len());
            cells.push(Cell {
                reference: c.to_vec(),
                vertices: vertices.iter().map(|v| v.to_vec()).collect(),
                volume: 1.5 * sqrt3 * delta * delta,
            });
        }
    }

    let mut facets = Vec::new();
    for (&(q, r), &a) in &index {
        for (dq, dr) in NEIGHBOR_STEPS {
            let Some(&b) = index.get(&(q + dq, r + dr)) else {
                continue;
            };
            let (ca, cb) = (center(q, r), center(q + dq, r + dr));
            let diff = [cb[0] - ca[0], cb[1] - ca[1]];
            let len = (diff[0] * diff[0] + diff[1] * diff[1]).sqrt();
            let normal = [diff[0] / len, diff[1] / len];
            let mid = [0.5 * (ca[0] + cb[0]), 0.5 * (ca[1] + cb[1])];
            let half = 0.5 * delta;
            let tangent = [-normal[1], normal[0]];
            facets.push(Facet {
                cell_a: a,
                cell_b: b,
                measure: delta,
                normal: normal.to_vec(),
                vertices: vec![
                    vec![mid[0] - half * tangent[0], mid[1] - half * tangent[1]],
                    vec![mid[0] + half * tangent[0], mid[1] + half * tangent[1]],
                ],
            });
        }
    }
    // HashMap iteration order is not stable; fix the facet order.
    facets.sort_by_key(|f| (f.cell_a, f.cell_b));

    let diameter_bound = cells
        .iter()
        .map(|c| super::diameter(&polygon::clip_to_box(&to_2d(&c.vertices), window).iter().map(|p| p.to_vec()).collect::<Vec<_>>()))
        .fold(0.0, f64::max);

    Ok(WindowedHoneycomb::new(Honeycomb {
        d: 2,
        cells,
        facets,
        window: window.clone(),
        diameter_bound,
        diagnostics: Diagnostics::default(),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tessellation::{pyramid_identity_sum, NORMALITY_TOLERANCE};

    #[test]
    fn hexagon_geometry() {
        let w = AxisBox::centered_cube(2, 5.0);
        let h = hexagonal_honeycomb(1.0, &w).unwrap();
        let cell = &h.honeycomb.cells[0];
        let poly = to_2d(&cell.vertices);
        assert!((polygon::area(&poly) - 3.0 * 3f64.sqrt() / 2.0).abs() < 1e-12);
        assert!((cell.volume - 2.598_076_211_353_316).abs() < 1e-12);
        for f in &h.honeycomb.facets {
            assert_eq!(f.measure, 1.0);
            let ra = &h.honeycomb.cells[f.cell_a].reference;
            let rb = &h.honeycomb.cells[f.cell_b].reference;
            let dist = ((ra[0] - rb[0]).powi(2) + (ra[1] - rb[1]).powi(2)).sqrt();
            assert!((dist - 3f64.sqrt()).abs() < 1e-12);
            // the facet endpoints are hexagon vertices of both cells
            for v in &f.vertices {
                for c in [f.cell_a, f.cell_b] {
                    assert!(h.honeycomb.cells[c]
                        .vertices
                        .iter()
                        .any(|w| (w[0] - v[0]).abs() < 1e-12 && (w[1] - v[1]).abs() < 1e-12));
                }
            }
        }
        assert!(h.honeycomb.check_normality(NORMALITY_TOLERANCE).is_ok());
    }

    #[test]
    fn interior_cells_have_six_neighbors() {
        let w = AxisBox::centered_cube(2, 4.0);
        let h = hexagonal_honeycomb(0.5, &w).unwrap();
        let mut degree = vec![0usize; h.honeycomb.cells.len()];
        for f in &h.honeycomb.facets {
            degree[f.cell_a] += 1;
            degree[f.cell_b] += 1;
        }
        for (i, c) in h.honeycomb.cells.iter().enumerate() {
            if c.reference.iter().all(|x| x.abs() < 3.0) {
                assert_eq!(degree[i], 6);
            }
        }
    }

    #[test]
    fn partition_and_pyramid_bound() {
        let w = AxisBox::new(vec![-3.0, -2.0], vec![3.5, 2.5]).unwrap();
        let h = hexagonal_honeycomb(0.3, &w).unwrap();
        assert!((h.clipped_volume_sum().unwrap() / w.volume() - 1.0).abs() < 1e-9);
        let ratio = pyramid_identity_sum(&h) / (4.0 * w.volume());
        assert!(ratio > 0.0 && ratio <= h.coverage_ratio() + 1e-12);
        assert!(h.coverage_ratio() > 0.7 && h.coverage_ratio() <= 1.0);
    }

    #[test]
    fn rejects_oversized_radius() {
        let w = AxisBox::centered_cube(2, 1.0);
        assert!(hexagonal_honeycomb(2.5, &w).is_err());
        assert!(hexagonal_honeycomb(0.0, &w).is_err());
    }
}
