//! Convex polygon helpers for 2D cells.

use crate::geometry::AxisBox;

pub type P2 = [f64; 2];

/// Signed shoelace area; positive for counter-clockwise polygons.
pub fn signed_area(poly: &[P2]) -> f64 {
    let n = poly.len();
    if n < 3 {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        acc += a[0] * b[1] - a[1] * b[0];
    }
    0.5 * acc
}

pub fn area(poly: &[P2]) -> f64 {
    signed_area(poly).abs()
}

/// Clips a convex polygon to the half-plane `<x - anchor, normal> <= 0`.
///
/// `labels[k]` tags the edge from vertex `k` to vertex `k+1`; edges created
/// along the clipping line get `new_label`.
pub fn clip_halfplane<L: Copy>(
    poly: &[P2],
    labels: &[L],
    anchor: P2,
    normal: P2,
    new_label: L,
) -> (Vec<P2>, Vec<L>) {
    let n = poly.len();
    let side = |p: P2| (p[0] - anchor[0]) * normal[0] + (p[1] - anchor[1]) * normal[1];
    let mut out = Vec::with_capacity(n + 1);
    let mut out_labels = Vec::with_capacity(n + 1);
    for k in 0..n {
        let cur = poly[k];
        let next = poly[(k + 1) % n];
        let (sc, sn) = (side(cur), side(next));
        let cur_in = sc <= 0.0;
        let next_in = sn <= 0.0;
        if cur_in {
            out.push(cur);
            out_labels.push(labels[k]);
            if !next_in {
                out.push(lerp(cur, next, sc / (sc - sn)));
                out_labels.push(new_label);
            }
        } else if next_in {
            out.push(lerp(cur, next, sc / (sc - sn)));
            out_labels.push(labels[k]);
        }
    }
    (out, out_labels)
}

fn lerp(a: P2, b: P2, t: f64) -> P2 {
    [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
}

/// Counter-clockwise rectangle of a 2D box.
pub fn box_polygon(b: &AxisBox) -> Vec<P2> {
    vec![
        [b.lo[0], b.lo[1]],
        [b.hi[0], b.lo[1]],
        [b.hi[0], b.hi[1]],
        [b.lo[0], b.hi[1]],
    ]
}

/// Intersection of a convex polygon with a 2D box.
pub fn clip_to_box(poly: &[P2], b: &AxisBox) -> Vec<P2> {
    let mut cur = poly.to_vec();
    let planes = [
        ([b.lo[0], 0.0], [-1.0, 0.0]),
        ([b.hi[0], 0.0], [1.0, 0.0]),
        ([0.0, b.lo[1]], [0.0, -1.0]),
        ([0.0, b.hi[1]], [0.0, 1.0]),
    ];
    for (anchor, normal) in planes {
        if cur.is_empty() {
            break;
        }
        let labels = vec![(); cur.len()];
        cur = clip_halfplane(&cur, &labels, anchor, normal, ()).0;
    }
    cur
}

/// Closed point-in-convex-polygon test for a counter-clockwise polygon.
pub fn contains(poly: &[P2], p: P2, tol: f64) -> bool {
    let n = poly.len();
    (0..n).all(|k| {
        let a = poly[k];
        let b = poly[(k + 1) % n];
        let cross = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
        let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
        cross >= -tol * len
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_area_and_clip() {
        let sq = vec![[0.0, 0.0], [2.0, 0.0], [2.0, 2.0], [0.0, 2.0]];
        assert_eq!(signed_area(&sq), 4.0);
        let b = AxisBox::new(vec![1.0, -1.0], vec![3.0, 1.0]).unwrap();
        let c = clip_to_box(&sq, &b);
        assert!((area(&c) - 1.0).abs() < 1e-15);
        let far = AxisBox::new(vec![5.0, 5.0], vec![6.0, 6.0]).unwrap();
        assert!(clip_to_box(&sq, &far).is_empty());
    }

    #[test]
    fn halfplane_labels_track_new_edge() {
        let sq = vec![[0.0, 0.0], [2.0, 0.0], [2.0, 2.0], [0.0, 2.0]];
        let labels = [0, 1, 2, 3];
        let (p, l) = clip_halfplane(&sq, &labels, [1.0, 0.0], [1.0, 0.0], 9);
        assert!((area(&p) - 2.0).abs() < 1e-15);
        assert_eq!(l.iter().filter(|&&x| x == 9).count(), 1);
        let k = l.iter().position(|&x| x == 9).unwrap();
        let (a, b) = (p[k], p[(k + 1) % p.len()]);
        assert_eq!(a[0], 1.0);
        assert_eq!(b[0], 1.0);
        assert!(contains(&p, [0.5, 0.5], 0.0));
        assert!(!contains(&p, [1.5, 0.5], 0.0));
    }
}
