//! Incremental Bowyer–Watson Delaunay triangulation in the plane.
//!
//! Orientation and in-circle signs come from adaptive exact predicates.
//! Cocircular configurations are broken by treating a point exactly on a
//! circumcircle as outside it, which is the same as nudging every inserted
//! point infinitesimally away from the circles it touches; the result is a
//! valid (weak) Delaunay triangulation.

use std::collections::HashMap;

use robust::{incircle, orient2d, Coord};

use crate::error::{Error, Result};

const NONE: usize = usize::MAX;

#[inline]
fn c(p: [f64; 2]) -> Coord<f64> {
    Coord { x: p[0], y: p[1] }
}

/// A Delaunay triangulation of a point set. Triangles are counter-clockwise
/// index triples into `points`.
#[derive(Debug, Clone)]
pub struct Triangulation {
    pub points: Vec<[f64; 2]>,
    pub triangles: Vec<[usize; 3]>,
}

struct Mesh {
    pts: Vec<[f64; 2]>,
    tri: Vec<[usize; 3]>,
    /// `nbr[t][i]` is the triangle across the edge opposite vertex `i`.
    nbr: Vec<[usize; 3]>,
    alive: Vec<bool>,
}

impl Mesh {
    fn orient(&self, a: usize, b: usize, p: [f64; 2]) -> f64 {
        orient2d(c(self.pts[a]), c(self.pts[b]), c(p))
    }

    fn in_circle(&self, t: usize, p: [f64; 2]) -> bool {
        let [a, b, cc] = self.tri[t];
        incircle(c(self.pts[a]), c(self.pts[b]), c(self.pts[cc]), c(p)) > 0.0
    }

    /// Visibility walk from `start` to a triangle containing `p`. The walk
    /// terminates on Delaunay triangulations.
    fn locate(&self, start: usize, p: [f64; 2]) -> usize {
        let mut t = start;
        'walk: loop {
            let v = self.tri[t];
            for k in 0..3 {
                if self.orient(v[(k + 1) % 3], v[(k + 2) % 3], p) < 0.0 {
                    t = self.nbr[t][k];
                    continue 'walk;
                }
            }
            return t;
        }
    }

    fn insert(&mut self, p_idx: usize, hint: usize) -> usize {
        let p = self.pts[p_idx];
        let t0 = self.locate(hint, p);

        let mut cavity = vec![t0];
        let mut in_cavity: HashMap<usize, ()> = HashMap::new();
        in_cavity.insert(t0, ());
        let mut boundary: Vec<(usize, usize, usize)> = Vec::new();
        let mut head = 0;
        while head < cavity.len() {
            let t = cavity[head];
            head += 1;
            for k in 0..3 {
                let nb = self.nbr[t][k];
                if nb != NONE && in_cavity.contains_key(&nb) {
                    continue;
                }
                if nb != NONE && self.in_circle(nb, p) {
                    in_cavity.insert(nb, ());
                    cavity.push(nb);
                } else {
                    let v = self.tri[t];
                    boundary.push((v[(k + 1) % 3], v[(k + 2) % 3], nb));
                }
            }
        }
        // Boundary edges whose outer neighbour was later absorbed are interior.
        boundary.retain(|&(_, _, nb)| nb == NONE || !in_cavity.contains_key(&nb));

        for &t in &cavity {
            self.alive[t] = false;
        }

        let mut by_first = HashMap::with_capacity(boundary.len());
        let mut by_second = HashMap::with_capacity(boundary.len());
        let mut created = Vec::with_capacity(boundary.len());
        for &(a, b, outer) in &boundary {
            let id = self.tri.len();
            self.tri.push([a, b, p_idx]);
            self.nbr.push([NONE, NONE, outer]);
            self.alive.push(true);
            if outer != NONE {
                for k in 0..3 {
                    let ov = self.tri[outer];
                    if ov[(k + 1) % 3] == b && ov[(k + 2) % 3] == a {
                        self.nbr[outer][k] = id;
                    }
                }
            }
            by_first.insert(a, id);
            by_second.insert(b, id);
            created.push(id);
        }
        for &id in &created {
            let [a, b, _] = self.tri[id];
            // opposite a: edge (b, p) shared with the triangle starting at b
            self.nbr[id][0] = by_first[&b];
            // opposite b: edge (p, a) shared with the triangle ending at a
            self.nbr[id][1] = by_second[&a];
        }
        *created.last().expect("cavity has a boundary")
    }
}

/// Hilbert curve index of a point quantized to a `2^16` grid.
fn hilbert_key(x: u32, y: u32) -> u64 {
    let (mut x, mut y) = (x as u64, y as u64);
    let n: u64 = 1 << 16;
    let mut d = 0u64;
    let mut s = n / 2;
    while s > 0 {
        let rx = u64::from(x & s > 0);
        let ry = u64::from(y & s > 0);
        d += s * s * ((3 * rx) ^ ry);
        if ry == 0 {
            if rx == 1 {
                x = n - 1 - x;
                y = n - 1 - y;
            }
            std::mem::swap(&mut x, &mut y);
        }
        s /= 2;
    }
    d
}

impl Triangulation {
    /// Triangulates `points`, which must be pairwise distinct and not all
    /// collinear.
    pub fn new(points: &[[f64; 2]]) -> Result<Self> {
        let n = points.len();
        if n < 3 {
            return Err(Error::Construction(format!("need at least 3 points, got {n}")));
        }
        if points.iter().any(|p| !p[0].is_finite() || !p[1].is_finite()) {
            return Err(Error::Construction("non-finite point".into()));
        }
        if all_collinear(points) {
            return Err(Error::Construction("all points are collinear".into()));
        }

        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for p in points {
            for a in 0..2 {
                lo[a] = lo[a].min(p[a]);
                hi[a] = hi[a].max(p[a]);
            }
        }
        let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(f64::MIN_POSITIVE);
        let mid = [0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])];
        let big = 1e4 * span;

        let mut pts = points.to_vec();
        pts.push([mid[0] - big, mid[1] - big]);
        pts.push([mid[0] + big, mid[1] - big]);
        pts.push([mid[0], mid[1] + big]);
        let mut mesh = Mesh {
            pts,
            tri: vec![[n, n + 1, n + 2]],
            nbr: vec![[NONE; 3]],
            alive: vec![true],
        };

        let mut order: Vec<usize> = (0..n).collect();
        let q = |v: f64, a: usize| (((v - lo[a]) / span) * 65535.0).clamp(0.0, 65535.0) as u32;
        order.sort_by_key(|&i| (hilbert_key(q(points[i][0], 0), q(points[i][1], 1)), i));

        let mut hint = 0;
        for i in order {
            hint = mesh.insert(i, hint);
        }

        let triangles = mesh
            .tri
            .iter()
            .zip(&mesh.alive)
            .filter(|(t, &alive)| alive && t.iter().all(|&v| v < n))
            .map(|(t, _)| *t)
            .collect();
        Ok(Self {
            points: points.to_vec(),
            triangles,
        })
    }

    /// Sorted Delaunay neighbours of every point.
    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.points.len()];
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }
}

pub(crate) fn all_collinear(points: &[[f64; 2]]) -> bool {
    let a = points[0];
    let Some(&b) = points.iter().find(|p| **p != a) else {
        return true;
    };
    points.iter().all(|&p| orient2d(c(a), c(b), c(p)) == 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn circumcircle_empty(tri: &Triangulation) -> bool {
        tri.triangles.iter().all(|t| {
            tri.points.iter().enumerate().all(|(i, &p)| {
                t.contains(&i)
                    || incircle(c(tri.points[t[0]]), c(tri.points[t[1]]), c(tri.points[t[2]]), c(p)) <= 0.0
            })
        })
    }

    #[test]
    fn random_points_are_delaunay() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let pts: Vec<[f64; 2]> = (0..300).map(|_| [rng.random::<f64>(), rng.random::<f64>()]).collect();
        let tri = Triangulation::new(&pts).unwrap();
        assert!(circumcircle_empty(&tri));
        // Euler: interior triangulation of n points with h hull points has 2n - h - 2 triangles.
        let area: f64 = tri
            .triangles
            .iter()
            .map(|t| 0.5 * orient2d(c(pts[t[0]]), c(pts[t[1]]), c(pts[t[2]])))
            .sum();
        assert!(tri.triangles.iter().all(|t| orient2d(c(pts[t[0]]), c(pts[t[1]]), c(pts[t[2]])) > 0.0));
        assert!(area > 0.9 && area <= 1.0);
    }

    #[test]
    fn lattice_with_cocircular_quads() {
        let pts: Vec<[f64; 2]> = (0..12).flat_map(|i| (0..12).map(move |j| [i as f64, j as f64])).collect();
        let tri = Triangulation::new(&pts).unwrap();
        assert!(circumcircle_empty(&tri));
        assert_eq!(tri.triangles.len(), 2 * 11 * 11);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(Triangulation::new(&[[0.0, 0.0], [1.0, 0.0]]).is_err());
        assert!(Triangulation::new(&[[0.0, 0.0], [1.0, 1.0], [2.0, 2.0], [3.0, 3.0]]).is_err());
    }

    #[test]
    fn hilbert_keys_are_a_bijection_on_small_grid() {
        let mut keys: Vec<u64> = (0..64u32).flat_map(|x| (0..64u32).map(move |y| hilbert_key(x << 10, y << 10))).collect();
        keys.sort_unstable();
        keys.dedup();
        assert_eq!(keys.len(), 64 * 64);
    }
}
