//! Brute-force checks that do not go through the cone criterion.
//!
//! [`crooked_intersect_oracle`] meshes both planes inside a ball and scans
//! triangle pairs; since every piece is planar the meshes lie exactly on the
//! surfaces, so any hit is a genuine intersection. A miss only certifies that
//! nothing was found inside the ball.
//!
//! [`cone_contains_oracle`] decides cone membership by projected coordinate
//! descent on the generator weights, deliberately unrelated to both the
//! facet test and the active-set solver.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::{crooked_contains, crooked_distance, mesh_crooked_plane, CrookedPlane, Mesh, MinPoint, PieceLabel};
use crate::lorentz::LVec3;

/// Separation a refined witness must reach.
pub const WITNESS_TOL: f64 = 1e-6;

/// Cap on refinement steps.
pub const MAX_REFINE_STEPS: usize = 60;

pub type Triangle = [LVec3; 3];

/// A point lying on both crooked planes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub point: MinPoint,
    pub piece_a: PieceLabel,
    pub piece_b: PieceLabel,
    /// Largest Euclidean distance from `point` to either surface.
    pub separation: f64,
    pub refine_steps: usize,
}

fn plane_of(t: &Triangle) -> (LVec3, f64) {
    let n = (t[1] - t[0]).euclid_cross(&(t[2] - t[0]));
    let len = n.euclid_norm();
    let n = n * (1.0 / len);
    (n, -n.euclid_dot(&t[0]))
}

fn snap(d: f64, tol: f64) -> f64 {
    if d.abs() <= tol {
        0.0
    } else {
        d
    }
}

/// Points where the edges of `t` meet the plane with signed vertex distances
/// `d`, ordered along `dir`.
fn crossing_span(t: &Triangle, d: &[f64; 3], dir: &LVec3) -> Option<(f64, LVec3, f64, LVec3)> {
    let mut pts: Vec<LVec3> = Vec::with_capacity(3);
    for i in 0..3 {
        if d[i] == 0.0 {
            pts.push(t[i]);
        }
        let j = (i + 1) % 3;
        if d[i] * d[j] < 0.0 {
            pts.push(t[i] + (t[j] - t[i]) * (d[i] / (d[i] - d[j])));
        }
    }
    let mut it = pts.iter().map(|p| (dir.euclid_dot(p), *p));
    let first = it.next()?;
    let (mut lo, mut hi) = (first, first);
    for cur in it {
        if cur.0 < lo.0 {
            lo = cur;
        }
        if cur.0 > hi.0 {
            hi = cur;
        }
    }
    Some((lo.0, lo.1, hi.0, hi.1))
}

/// Interval-overlap triangle-triangle test. Returns a segment contained in
/// both triangles when they meet within `tol`.
pub fn tri_tri_intersect(t1: &Triangle, t2: &Triangle, tol: f64) -> Option<(LVec3, LVec3)> {
    let (n2, c2) = plane_of(t2);
    let d1 = t1.map(|p| snap(n2.euclid_dot(&p) + c2, tol));
    if d1.iter().all(|&d| d > 0.0) || d1.iter().all(|&d| d < 0.0) {
        return None;
    }
    let (n1, c1) = plane_of(t1);
    let d2 = t2.map(|p| snap(n1.euclid_dot(&p) + c1, tol));
    if d2.iter().all(|&d| d > 0.0) || d2.iter().all(|&d| d < 0.0) {
        return None;
    }
    if d1.iter().all(|&d| d == 0.0) {
        return coplanar_overlap(t1, t2, &n1, tol);
    }
    let dir = n1.euclid_cross(&n2);
    let (a_lo, pa_lo, a_hi, pa_hi) = crossing_span(t1, &d1, &dir)?;
    let (b_lo, pb_lo, b_hi, pb_hi) = crossing_span(t2, &d2, &dir)?;
    let slack = tol * dir.euclid_norm();
    if a_hi < b_lo - slack || b_hi < a_lo - slack {
        return None;
    }
    let start = if a_lo >= b_lo { pa_lo } else { pb_lo };
    let end = if a_hi <= b_hi { pa_hi } else { pb_hi };
    Some((start, end))
}

fn coplanar_overlap(t1: &Triangle, t2: &Triangle, n: &LVec3, tol: f64) -> Option<(LVec3, LVec3)> {
    // Drop the dominant normal axis.
    let (ax, ay) = {
        let a = [n.x().abs(), n.y().abs(), n.z().abs()];
        if a[0] >= a[1] && a[0] >= a[2] {
            (1, 2)
        } else if a[1] >= a[2] {
            (0, 2)
        } else {
            (0, 1)
        }
    };
    let p2 = |v: &LVec3| {
        let a = v.to_array();
        (a[ax], a[ay])
    };
    let inside = |p: &LVec3, t: &Triangle| {
        let q = p2(p);
        let s: Vec<f64> = (0..3)
            .map(|i| {
                let (a, b) = (p2(&t[i]), p2(&t[(i + 1) % 3]));
                (b.0 - a.0) * (q.1 - a.1) - (b.1 - a.1) * (q.0 - a.0)
            })
            .collect();
        s.iter().all(|&x| x >= -tol) || s.iter().all(|&x| x <= tol)
    };
    let mut pts: Vec<LVec3> = Vec::new();
    pts.extend(t1.iter().filter(|p| inside(p, t2)));
    pts.extend(t2.iter().filter(|p| inside(p, t1)));
    for i in 0..3 {
        for j in 0..3 {
            let (a, b) = (t1[i], t1[(i + 1) % 3]);
            let (c, d) = (t2[j], t2[(j + 1) % 3]);
            let (pa, pb, pc, pd) = (p2(&a), p2(&b), p2(&c), p2(&d));
            let r = (pb.0 - pa.0, pb.1 - pa.1);
            let s = (pd.0 - pc.0, pd.1 - pc.1);
            let den = r.0 * s.1 - r.1 * s.0;
            if den.abs() <= f64::EPSILON {
                continue;
            }
            let qp = (pc.0 - pa.0, pc.1 - pa.1);
            let t = (qp.0 * s.1 - qp.1 * s.0) / den;
            let u = (qp.0 * r.1 - qp.1 * r.0) / den;
            if (-tol..=1.0 + tol).contains(&t) && (-tol..=1.0 + tol).contains(&u) {
                pts.push(a + (b - a) * t);
            }
        }
    }
    let first = *pts.first()?;
    Some((first, *pts.last().unwrap()))
}

fn bounds(t: &Triangle) -> (LVec3, LVec3) {
    let lo = LVec3::raw(
        t[0].x().min(t[1].x()).min(t[2].x()),
        t[0].y().min(t[1].y()).min(t[2].y()),
        t[0].z().min(t[1].z()).min(t[2].z()),
    );
    let hi = LVec3::raw(
        t[0].x().max(t[1].x()).max(t[2].x()),
        t[0].y().max(t[1].y()).max(t[2].y()),
        t[0].z().max(t[1].z()).max(t[2].z()),
    );
    (lo, hi)
}

fn overlaps(a: &(LVec3, LVec3), b: &(LVec3, LVec3), pad: f64) -> bool {
    a.0.x() <= b.1.x() + pad
        && b.0.x() <= a.1.x() + pad
        && a.0.y() <= b.1.y() + pad
        && b.0.y() <= a.1.y() + pad
        && a.0.z() <= b.1.z() + pad
        && b.0.z() <= a.1.z() + pad
}

/// Uniform grid of boxes over one mesh.
struct BoxGrid {
    cell: f64,
    buckets: HashMap<(i64, i64, i64), Vec<u32>>,
    boxes: Vec<(LVec3, LVec3)>,
}

impl BoxGrid {
    fn new(mesh: &Mesh, cell: f64) -> Self {
        let boxes: Vec<_> = (0..mesh.triangles.len()).map(|i| bounds(&mesh.triangle(i))).collect();
        let mut buckets: HashMap<(i64, i64, i64), Vec<u32>> = HashMap::new();
        let mut grid = BoxGrid { cell, buckets: HashMap::new(), boxes: Vec::new() };
        for (i, b) in boxes.iter().enumerate() {
            for key in grid.cells(b) {
                buckets.entry(key).or_default().push(i as u32);
            }
        }
        grid.buckets = buckets;
        grid.boxes = boxes;
        grid
    }

    fn cells(&self, b: &(LVec3, LVec3)) -> impl Iterator<Item = (i64, i64, i64)> {
        let c = self.cell;
        let lo = [b.0.x(), b.0.y(), b.0.z()].map(|v| (v / c).floor() as i64);
        let hi = [b.1.x(), b.1.y(), b.1.z()].map(|v| (v / c).floor() as i64);
        (lo[0]..=hi[0]).flat_map(move |i| (lo[1]..=hi[1]).flat_map(move |j| (lo[2]..=hi[2]).map(move |k| (i, j, k))))
    }

    /// Candidate triangle indices, ascending and deduplicated.
    fn query(&self, b: &(LVec3, LVec3), pad: f64) -> Vec<u32> {
        let mut out: Vec<u32> = self
            .cells(b)
            .filter_map(|k| self.buckets.get(&k))
            .flatten()
            .copied()
            .filter(|&i| overlaps(&self.boxes[i as usize], b, pad))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Refines a point near both surfaces by alternating projection onto the
/// planes of the two nearest pieces.
fn refine(point: LVec3, a: &CrookedPlane, b: &CrookedPlane) -> (LVec3, f64, usize) {
    let dist = |x: &LVec3| {
        let q = MinPoint::from_vec(*x);
        crooked_distance(&q, a).0.max(crooked_distance(&q, b).0)
    };
    let nearest_sector = |plane: &CrookedPlane, x: &LVec3| {
        let w = *x - plane.vertex().to_vec();
        *plane
            .sectors()
            .iter()
            .min_by(|s, t| s.distance(&w).total_cmp(&t.distance(&w)))
            .unwrap()
    };
    let mut x = point;
    let mut sep = dist(&x);
    let mut steps = 0;
    while sep > WITNESS_TOL * 1e-3 && steps < MAX_REFINE_STEPS {
        for plane in [a, b] {
            let apex = plane.vertex().to_vec();
            let s = nearest_sector(plane, &x);
            x = apex + s.project_to_plane(&(x - apex));
        }
        steps += 1;
        let next = dist(&x);
        if next >= sep {
            sep = next;
            break;
        }
        sep = next;
    }
    (x, sep, steps)
}

/// Searches for a point common to both crooked planes within `radius` of
/// their vertices.
pub fn crooked_intersect_oracle(p: &CrookedPlane, q: &CrookedPlane, radius: f64, resolution: usize) -> Option<Witness> {
    let ma = mesh_crooked_plane(p, radius, resolution).ok()?;
    let mb = mesh_crooked_plane(q, radius, resolution).ok()?;
    let cell = (radius * 4.0 / resolution as f64).max(1e-6);
    let grid = BoxGrid::new(&mb, cell);
    let tol = 1e-12 * (1.0 + radius);
    let pad = 1e-9 * (1.0 + radius);

    (0..ma.triangles.len()).into_par_iter().find_map_first(|i| {
        let ta = ma.triangle(i);
        let ba = bounds(&ta);
        for j in grid.query(&ba, pad) {
            let tb = mb.triangle(j as usize);
            let Some((start, _)) = tri_tri_intersect(&ta, &tb, tol) else { continue };
            let (x, sep, steps) = refine(start, p, q);
            if sep > WITNESS_TOL {
                continue;
            }
            let point = MinPoint::from_vec(x);
            let label_tol = WITNESS_TOL / (1.0 + radius);
            let piece_a = crooked_contains(&point, p, label_tol);
            let piece_b = crooked_contains(&point, q, label_tol);
            if piece_a.is_outside() || piece_b.is_outside() {
                continue;
            }
            return Some(Witness { point, piece_a, piece_b, separation: sep, refine_steps: steps });
        }
        None
    })
}

/// Result of the sampling-based cone membership check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleMembership {
    pub member: bool,
    pub interior: bool,
}

/// Residual of the best nonnegative combination of `generators` approximating
/// `x`, by projected coordinate descent from zero weights.
pub fn cone_residual(generators: &[LVec3], x: &LVec3, tol: f64) -> f64 {
    let norms: Vec<f64> = generators.iter().map(|g| g.euclid_dot(g)).collect();
    let mut lambda = vec![0.0; generators.len()];
    let mut r = *x;
    let mut obj = r.euclid_dot(&r);
    for _ in 0..200_000 {
        for (i, g) in generators.iter().enumerate() {
            if norms[i] == 0.0 {
                continue;
            }
            let next = (lambda[i] + g.euclid_dot(&r) / norms[i]).max(0.0);
            r = r - *g * (next - lambda[i]);
            lambda[i] = next;
        }
        let next_obj = r.euclid_dot(&r);
        let gain = obj - next_obj;
        obj = next_obj;
        if gain < tol * tol {
            break;
        }
    }
    obj.sqrt()
}

/// Membership of `x` in the cone spanned by `generators`; interior means the
/// six probes `x ± δ e_k`, `δ = 1e-4 |x|`, are all members.
pub fn cone_contains_oracle(generators: &[LVec3], x: &LVec3, tol: f64) -> OracleMembership {
    let is_member = |y: &LVec3| cone_residual(generators, y, tol) <= tol * (1.0 + y.euclid_norm());
    let member = is_member(x);
    let delta = 1e-4 * x.euclid_norm();
    let interior = member
        && delta > 0.0
        && [LVec3::E1, LVec3::E2, LVec3::E3]
            .iter()
            .all(|e| is_member(&(*x + *e * delta)) && is_member(&(*x - *e * delta)));
    OracleMembership { member, interior }
}
