//! Crooked planes: representation, piecewise membership and meshing.
//!
//! In the null frame `(u, u-, u+)` of its directing vector, the linear crooked
//! plane `C(u)` is the union of
//!
//! * the stem `{b u- + c u+ : b c >= 0}`,
//! * the wing `{a u + c u+ : a >= 0}` (labelled [`Piece::WingPlus`]),
//! * the wing `{a u + b u- : a <= 0}` (labelled [`Piece::WingMinus`]).
//!
//! The wing signs come from `u × u+ = u+` and `u × u- = -u-`: a vector
//! `a u + c u+` satisfies `v × u+ = a u+`, so it meets the defining condition
//! `v × w = k w, k >= 0` with the stem witness `w = u+` exactly when `a >= 0`.

use std::fmt;
use std::ops::{Add, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lorentz::{null_frame, LVec3, NullFrame};

/// Default membership tolerance, relative to the magnitude of the query.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// Width of the marginal band, in multiples of the membership tolerance.
pub const MARGINAL_FACTOR: f64 = 10.0;

/// A point of Minkowski space, in coordinates relative to a fixed origin.
#[derive(Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct MinPoint(LVec3);

impl MinPoint {
    pub const ORIGIN: MinPoint = MinPoint(LVec3::ZERO);

    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        LVec3::new(x, y, z).map(MinPoint)
    }

    /// The point `o + v`.
    pub fn from_vec(v: LVec3) -> Self {
        MinPoint(v)
    }

    /// Displacement from the origin.
    pub fn to_vec(self) -> LVec3 {
        self.0
    }

    pub fn to_array(self) -> [f64; 3] {
        self.0.to_array()
    }
}

impl TryFrom<[f64; 3]> for MinPoint {
    type Error = Error;
    fn try_from(a: [f64; 3]) -> Result<Self> {
        LVec3::try_from(a).map(MinPoint)
    }
}

impl From<MinPoint> for [f64; 3] {
    fn from(p: MinPoint) -> Self {
        p.to_array()
    }
}

impl fmt::Debug for MinPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MinPoint{:?}", self.0)
    }
}

impl Sub for MinPoint {
    type Output = LVec3;
    fn sub(self, o: MinPoint) -> LVec3 {
        self.0 - o.0
    }
}

impl Add<LVec3> for MinPoint {
    type Output = MinPoint;
    fn add(self, v: LVec3) -> MinPoint {
        MinPoint(self.0 + v)
    }
}

impl Sub<LVec3> for MinPoint {
    type Output = MinPoint;
    fn sub(self, v: LVec3) -> MinPoint {
        MinPoint(self.0 - v)
    }
}

/// The crooked plane `C(p, u) = p + C(u)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrookedPlane {
    vertex: MinPoint,
    frame: NullFrame,
}

impl CrookedPlane {
    /// Fails unless `direction` is unit spacelike within `1e-9`.
    pub fn new(vertex: MinPoint, direction: LVec3) -> Result<Self> {
        Ok(CrookedPlane { vertex, frame: null_frame(&direction)? })
    }

    pub fn vertex(&self) -> MinPoint {
        self.vertex
    }

    pub fn direction(&self) -> LVec3 {
        self.frame.u
    }

    pub fn frame(&self) -> &NullFrame {
        &self.frame
    }

    /// The same crooked plane with directing vector `-u`.
    pub fn flipped(&self) -> CrookedPlane {
        CrookedPlane {
            vertex: self.vertex,
            frame: NullFrame { u: -self.frame.u, u_minus: self.frame.u_plus, u_plus: self.frame.u_minus },
        }
    }

    /// The six closed planar sectors making up the surface, each
    /// spanned by two rays from the vertex with opening angle below π.
    pub fn sectors(&self) -> [Sector; 6] {
        let NullFrame { u, u_minus: m, u_plus: p } = self.frame;
        [
            Sector { piece: Piece::Stem, a: m, b: p },
            Sector { piece: Piece::Stem, a: -m, b: -p },
            Sector { piece: Piece::WingPlus, a: p, b: u },
            Sector { piece: Piece::WingPlus, a: u, b: -p },
            Sector { piece: Piece::WingMinus, a: m, b: -u },
            Sector { piece: Piece::WingMinus, a: -u, b: -m },
        ]
    }
}

/// Coordinates of a vector in the basis `(u, u-, u+)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameCoords {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl FrameCoords {
    fn scale(&self) -> f64 {
        self.alpha.abs().max(self.beta.abs()).max(self.gamma.abs())
    }
}

/// The linear piece of a crooked plane a point falls on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Piece {
    Stem,
    WingPlus,
    WingMinus,
    Outside,
}

impl Piece {
    pub fn group_name(self) -> &'static str {
        match self {
            Piece::Stem => "stem",
            Piece::WingPlus => "wing_plus",
            Piece::WingMinus => "wing_minus",
            Piece::Outside => "outside",
        }
    }
}

/// Piece classification plus a flag set when the query lies within the
/// marginal band of a piece boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PieceLabel {
    pub piece: Piece,
    pub marginal: bool,
}

impl PieceLabel {
    pub fn is_outside(&self) -> bool {
        self.piece == Piece::Outside
    }
}

/// A planar convex sector `{s a + t b : s, t >= 0}` of a crooked plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sector {
    pub piece: Piece,
    pub a: LVec3,
    pub b: LVec3,
}

impl Sector {
    /// Euclidean distance from `w` (relative to the apex) to the sector.
    pub fn distance(&self, w: &LVec3) -> f64 {
        let (a, b) = (self.a, self.b);
        let gaa = a.euclid_dot(&a);
        let gab = a.euclid_dot(&b);
        let gbb = b.euclid_dot(&b);
        let wa = w.euclid_dot(&a);
        let wb = w.euclid_dot(&b);
        let det = gaa * gbb - gab * gab;
        let s = (wa * gbb - wb * gab) / det;
        let t = (wb * gaa - wa * gab) / det;
        if s >= 0.0 && t >= 0.0 {
            return (*w - (s * a + t * b)).euclid_norm();
        }
        let ray = |d: LVec3, wd: f64, gdd: f64| (*w - d * (wd / gdd).max(0.0)).euclid_norm();
        ray(a, wa, gaa).min(ray(b, wb, gbb))
    }

    /// Projection of `w` onto the sector's plane.
    pub fn project_to_plane(&self, w: &LVec3) -> LVec3 {
        let n = self.a.euclid_cross(&self.b).euclid_normalized();
        *w - n * w.euclid_dot(&n)
    }
}

pub fn frame_coordinates(v: &LVec3, frame: &NullFrame) -> FrameCoords {
    let (alpha, beta, gamma) = frame.coords(v);
    FrameCoords { alpha, beta, gamma }
}

fn in_stem(c: &FrameCoords, tol: f64, s: f64) -> bool {
    c.alpha.abs() <= tol * s && c.beta * c.gamma >= -tol * s * s
}

fn in_wing_plus(c: &FrameCoords, tol: f64, s: f64) -> bool {
    c.beta.abs() <= tol * s && c.alpha >= -tol * s
}

fn in_wing_minus(c: &FrameCoords, tol: f64, s: f64) -> bool {
    c.gamma.abs() <= tol * s && c.alpha <= tol * s
}

/// Whether `v` lies in the stem `S(u)`: orthogonal to `u` and causal.
pub fn stem_contains(v: &LVec3, frame: &NullFrame, tol: f64) -> bool {
    let c = frame_coordinates(v, frame);
    let s = c.scale();
    s == 0.0 || in_stem(&c, tol, s)
}

/// Classifies `v` against the linear crooked plane `C(u)`.
///
/// Points on a null line shared by the stem and a wing are labelled with the
/// wing and flagged marginal. The zero vector is `Stem`, marginal.
pub fn piece_classify(v: &LVec3, frame: &NullFrame, tol: f64) -> PieceLabel {
    let c = frame_coordinates(v, frame);
    let s = c.scale();
    if s == 0.0 {
        return PieceLabel { piece: Piece::Stem, marginal: true };
    }
    let band = MARGINAL_FACTOR * tol * s;
    let stem = in_stem(&c, tol, s);
    let wp = in_wing_plus(&c, tol, s);
    let wm = in_wing_minus(&c, tol, s);
    let (piece, marginal) = match (stem, wp, wm) {
        (true, true, _) => (Piece::WingPlus, true),
        (true, false, true) => (Piece::WingMinus, true),
        (true, false, false) => (Piece::Stem, c.beta.abs().min(c.gamma.abs()) <= band),
        (false, true, _) => (Piece::WingPlus, c.alpha <= band),
        (false, false, true) => (Piece::WingMinus, -c.alpha <= band),
        (false, false, false) => {
            let t = MARGINAL_FACTOR * tol;
            let near = in_stem(&c, t, s) || in_wing_plus(&c, t, s) || in_wing_minus(&c, t, s);
            (Piece::Outside, near)
        }
    };
    PieceLabel { piece, marginal }
}

pub fn crooked_contains(q: &MinPoint, plane: &CrookedPlane, tol: f64) -> PieceLabel {
    piece_classify(&(*q - plane.vertex), &plane.frame, tol)
}

/// Membership in the stem quadrant `V(u) = {a u- - b u+ : a, b >= 0} \ {0}`.
///
/// With `strict` the test is for the relative interior `a, b > 0` inside the
/// plane `u^⊥`.
pub fn stem_quadrant_contains(v: &LVec3, frame: &NullFrame, strict: bool, tol: f64) -> bool {
    let c = frame_coordinates(v, frame);
    let s = c.scale();
    if s == 0.0 || c.alpha.abs() > tol * s {
        return false;
    }
    if strict {
        c.beta > tol * s && -c.gamma > tol * s
    } else {
        c.beta >= -tol * s && -c.gamma >= -tol * s
    }
}

/// Euclidean distance from `q` to the crooked plane, with the closest piece.
pub fn crooked_distance(q: &MinPoint, plane: &CrookedPlane) -> (f64, Piece) {
    let w = *q - plane.vertex;
    plane
        .sectors()
        .iter()
        .map(|s| (s.distance(&w), s.piece))
        .fold((f64::INFINITY, Piece::Outside), |best, cur| if cur.0 < best.0 { cur } else { best })
}

/// A triangulated patch of a crooked plane.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<MinPoint>,
    pub triangles: Vec<[usize; 3]>,
    pub piece_tags: Vec<Piece>,
}

impl Mesh {
    pub fn triangle(&self, i: usize) -> [LVec3; 3] {
        let [a, b, c] = self.triangles[i];
        [self.vertices[a].to_vec(), self.vertices[b].to_vec(), self.vertices[c].to_vec()]
    }
}

/// Triangulates `C(p, u)` inside the Euclidean ball of radius `radius` about
/// the vertex.
///
/// Each of the six planar sectors gets a polar grid of `resolution` rings by
/// `resolution` angular steps; all vertices lie inside the ball and exactly
/// on their piece, up to rounding.
pub fn mesh_crooked_plane(plane: &CrookedPlane, radius: f64, resolution: usize) -> Result<Mesh> {
    if !(radius > 0.0 && radius.is_finite()) || resolution < 2 {
        return Err(Error::InvalidParams(format!(
            "radius {radius} must be positive, resolution {resolution} at least 2"
        )));
    }
    let mut mesh = Mesh::default();
    for sector in plane.sectors() {
        mesh_sector(&mut mesh, plane.vertex, &sector, radius, resolution);
    }
    Ok(mesh)
}

fn mesh_sector(mesh: &mut Mesh, apex: MinPoint, sector: &Sector, radius: f64, n: usize) {
    let e = sector.a.euclid_normalized();
    let fb = sector.b.euclid_normalized();
    let f = (fb - e * fb.euclid_dot(&e)).euclid_normalized();
    let opening = fb.euclid_dot(&f).atan2(fb.euclid_dot(&e));

    let base = mesh.vertices.len();
    mesh.vertices.push(apex);
    // ring i (1..=n), angle j (0..=n)
    let index = |i: usize, j: usize| base + 1 + (i - 1) * (n + 1) + j;
    for i in 1..=n {
        let r = radius * i as f64 / n as f64;
        for j in 0..=n {
            let (sn, cs) = (opening * j as f64 / n as f64).sin_cos();
            let dir = if j == 0 {
                e
            } else if j == n {
                fb
            } else {
                e * cs + f * sn
            };
            mesh.vertices.push(apex + dir * r);
        }
    }
    for j in 0..n {
        mesh.triangles.push([base, index(1, j), index(1, j + 1)]);
        mesh.piece_tags.push(sector.piece);
    }
    for i in 1..n {
        for j in 0..n {
            let (a, b) = (index(i, j), index(i, j + 1));
            let (c, d) = (index(i + 1, j), index(i + 1, j + 1));
            mesh.triangles.push([a, c, d]);
            mesh.triangles.push([a, d, b]);
            mesh.piece_tags.push(sector.piece);
            mesh.piece_tags.push(sector.piece);
        }
    }
}
