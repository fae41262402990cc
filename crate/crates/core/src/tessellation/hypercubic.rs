use super::{Cell, Diagnostics, Facet, Honeycomb, WindowedHoneycomb};
use crate::error::{Error, Result};
use crate::sampler::GridSpec;

/// Largest lattice that [`hypercubic_honeycomb`] will materialize. Bigger
/// lattices go through the implicit [`GridSpec`] estimators instead.
pub const MAX_MATERIALIZED_CELLS: usize = 1 << 18;

/// Hypercubic honeycomb `V_i = delta i + [0, delta]^d`, `i ∈ [-N, N-1]^d`,
/// referenced by the lower corners `delta i` and windowed by
/// `T = [-delta N, delta N]^d`. Cell order matches the node order of
/// `GridSpec::new(d, N, delta)`.
pub fn hypercubic_honeycomb(delta: f64, n: usize, d: usize) -> Result<WindowedHoneycomb> {
    if d < 2 {
        return Err(Error::Domain(format!("hypercubic honeycomb needs d >= 2, got {d}")));
    }
    let grid = GridSpec::new(d, n, delta)?;
    let count = grid.node_count();
    if count > MAX_MATERIALIZED_CELLS || 1usize.checked_shl(d as u32).is_none() {
        return Err(Error::Capacity {
            what: "materialized hypercubic cells",
            requested: count,
            cap: MAX_MATERIALIZED_CELLS,
        });
    }
    let corner_offsets: Vec<Vec<f64>> = (0..1usize << d)
        .map(|mask| (0..d).map(|a| if mask >> a & 1 == 1 { delta } else { 0.0 }).collect())
        .collect();

    let mut cells = Vec::with_capacity(count);
    for lin in 0..count {
        let origin = grid.node_position(lin);
        let vertices = corner_offsets
            .iter()
            .map(|off| origin.iter().zip(off).map(|(o, x)| o + x).collect())
            .collect();
        cells.push(Cell {
            reference: origin,
            vertices,
            volume: delta.powi(d as i32),
        });
    }

    let side = grid.side();
    let mut facets = Vec::new();
    for lin in 0..count {
        let idx = grid.lattice_index(lin);
        for axis in 0..d {
            if idx[axis] + n as i64 + 1 >= side as i64 {
                continue;
            }
            let other = lin + grid.stride(axis);
            let mut normal = vec![0.0; d];
            normal[axis] = 1.0;
            let vertices = cells[lin]
                .vertices
                .iter()
                .filter(|v| (v[axis] - cells[lin].reference[axis] - delta).abs() < 0.5 * delta)
                .cloned()
                .collect();
            facets.push(Facet {
                cell_a: lin,
                cell_b: other,
                measure: delta.powi(d as i32 - 1),
                normal,
                vertices,
            });
        }
    }

    Ok(WindowedHoneycomb::new(Honeycomb {
        d,
        cells,
        facets,
        window: grid.window(),
        diameter_bound: delta * (d as f64).sqrt(),
        diagnostics: Diagnostics::default(),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tessellation::{pyramid_identity_sum, NORMALITY_TOLERANCE};

    #[test]
    fn two_by_two_lattice() {
        let h = hypercubic_honeycomb(1.0, 1, 2).unwrap();
        assert_eq!(h.inside_count(), 4);
        assert_eq!(h.interior_pairs().len(), 4);
        assert!(h.interior_pairs().iter().all(|p| p.measure == 1.0));
        assert_eq!(h.coverage_ratio(), 1.0);
        assert_eq!(pyramid_identity_sum(&h), 8.0);
        assert_eq!(pyramid_identity_sum(&h) / (2.0 * 2.0 * h.window_volume()), 0.5);
    }

    #[test]
    fn facet_counts() {
        let h = hypercubic_honeycomb(0.5, 2, 2).unwrap();
        assert_eq!(h.inside_count(), 16);
        assert_eq!(h.interior_pairs().len(), 24);
        let h3 = hypercubic_honeycomb(0.5, 2, 3).unwrap();
        assert_eq!(h3.inside_count(), 64);
        assert_eq!(h3.interior_pairs().len(), 3 * 3 * 16);
        assert!(h3.interior_pairs().iter().all(|p| p.measure == 0.25));
        assert!(h3.honeycomb.check_normality(NORMALITY_TOLERANCE).is_ok());
        assert!(h3.honeycomb.facets.iter().all(|f| f.vertices.len() == 4));
    }

    #[test]
    fn diameter_rescales_with_delta() {
        let a = hypercubic_honeycomb(0.5, 4, 2).unwrap();
        let b = hypercubic_honeycomb(0.25, 8, 2).unwrap();
        assert_eq!(a.window(), b.window());
        assert_eq!(b.honeycomb.diameter_bound, 0.5 * a.honeycomb.diameter_bound);
    }

    #[test]
    fn pyramid_ratio_formula() {
        // 2d sigma_d(T) (1 - 1/(2N)) in d = 2
        let h = hypercubic_honeycomb(0.25, 8, 2).unwrap();
        let ratio = pyramid_identity_sum(&h) / (4.0 * h.window_volume());
        assert!((ratio - 0.9375).abs() < 1e-12);
    }

    #[test]
    fn oversized_lattice_is_refused() {
        assert!(matches!(hypercubic_honeycomb(0.01, 400, 2), Err(Error::Capacity { .. })));
        assert!(hypercubic_honeycomb(1.0, 1, 1).is_err());
    }
}
