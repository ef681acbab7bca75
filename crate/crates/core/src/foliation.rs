//! Crooked foliations between two disjoint crooked planes.
//!
//! Given a path `u_t` of directing vectors and positive weights `f, g`, the
//! vertex curve `p_t = p_0 + ∫_0^t (f(s) u_s^- - g(s) u_s^+) ds` has velocity
//! in the open stem quadrant of `u_t` at every time, so the leaves
//! `C(p_t, u_t)` are pairwise disjoint. The weights are chosen from a
//! six-function family of endpoint-concentrated exponentials and constants so
//! that `p_1` hits the requested vertex; the coefficients come from a
//! nonnegative least squares fit on the displacements of the basis functions.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cone::{cone_contains, ConeMembership};
use crate::disjoint::{cone_a, consistently_oriented, crooked_disjoint, orient_pair, Verdict, DISJOINT_TOL, PAIR_TOL};
use crate::error::{Error, Result};
use crate::geometry::{stem_quadrant_contains, CrookedPlane, MinPoint, MEMBERSHIP_TOL};
use crate::lorentz::{null_frame, null_frame_tangent, normalize_spacelike, LVec3, NullFrame, UNIT_TOL};
use crate::nnls::nnls;
use crate::quadrature::{gauss_panel, integrate_unit, integrate_with_partition, QUAD_TOL};

/// Tolerance used by path checks.
pub const PATH_TOL: f64 = 1e-9;

/// Step of the centered differences used on sampled paths.
pub const FD_STEP: f64 = 1e-6;

/// A smooth path `t -> u_t` of unit spacelike vectors on [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub enum DirectingPath {
    /// `u_t = normalize((1 - t) u0 + t u1)`.
    Interp { u0: LVec3, u1: LVec3 },
    /// Cubic Hermite interpolation of knots, renormalized.
    Sampled { times: Vec<f64>, knots: Vec<LVec3>, tangents: Vec<LVec3> },
}

impl DirectingPath {
    /// Builds a sampled path. Times must increase strictly from 0 to 1 and
    /// every knot must be unit spacelike.
    pub fn sampled(times: Vec<f64>, knots: Vec<LVec3>) -> Result<Self> {
        if times.len() != knots.len() || times.len() < 2 {
            return Err(Error::InvalidParams("need at least two knots with matching times".into()));
        }
        if times[0] != 0.0 || *times.last().unwrap() != 1.0 || times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParams("knot times must increase from 0 to 1".into()));
        }
        for k in &knots {
            let q = k.quadratic();
            if !k.is_finite() || (q - 1.0).abs() > UNIT_TOL {
                return Err(Error::NotUnitSpacelike(q));
            }
        }
        let n = knots.len();
        let tangents = (0..n)
            .map(|i| {
                let (a, b) = (i.saturating_sub(1), (i + 1).min(n - 1));
                (knots[b] - knots[a]) * (1.0 / (times[b] - times[a]))
            })
            .collect();
        Ok(DirectingPath::Sampled { times, knots, tangents })
    }

    pub fn start(&self) -> LVec3 {
        self.eval(0.0)
    }

    pub fn end(&self) -> LVec3 {
        self.eval(1.0)
    }

    /// `u_t`; exact at the endpoints.
    pub fn eval(&self, t: f64) -> LVec3 {
        match self {
            DirectingPath::Interp { u0, u1 } => {
                if t <= 0.0 {
                    *u0
                } else if t >= 1.0 {
                    *u1
                } else {
                    let w = *u0 * (1.0 - t) + *u1 * t;
                    w * (1.0 / w.quadratic().sqrt())
                }
            }
            DirectingPath::Sampled { times, knots, tangents } => {
                if t <= 0.0 {
                    return knots[0];
                }
                if t >= 1.0 {
                    return *knots.last().unwrap();
                }
                let i = match times.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
                    Ok(i) => return knots[i],
                    Err(i) => i - 1,
                };
                let h = times[i + 1] - times[i];
                let s = (t - times[i]) / h;
                let (s2, s3) = (s * s, s * s * s);
                let w = knots[i] * (2.0 * s3 - 3.0 * s2 + 1.0)
                    + tangents[i] * ((s3 - 2.0 * s2 + s) * h)
                    + knots[i + 1] * (-2.0 * s3 + 3.0 * s2)
                    + tangents[i + 1] * ((s3 - s2) * h);
                normalize_spacelike(&w).unwrap_or(w)
            }
        }
    }

    /// `du_t/dt`: analytic for interpolated paths, centered differences for
    /// sampled ones.
    pub fn derivative(&self, t: f64) -> LVec3 {
        match self {
            DirectingPath::Interp { u0, u1 } => {
                let w = *u0 * (1.0 - t) + *u1 * t;
                let norm = w.quadratic().sqrt();
                let u = w * (1.0 / norm);
                let dw = *u1 - *u0;
                (dw - u * u.dot(&dw)) * (1.0 / norm)
            }
            DirectingPath::Sampled { .. } => {
                let a = (t - FD_STEP).max(0.0);
                let b = (t + FD_STEP).min(1.0);
                (self.eval(b) - self.eval(a)) * (1.0 / (b - a))
            }
        }
    }

    pub fn frame(&self, t: f64) -> NullFrame {
        let u = self.eval(t);
        null_frame(&u).unwrap_or_else(|_| {
            // Off-unit drift is bounded by the path checks; renormalize.
            let u = normalize_spacelike(&u).expect("directing path left the spacelike region");
            null_frame(&u).expect("normalized vector is unit")
        })
    }

    /// `(d u_t^-/dt, d u_t^+/dt)`.
    pub fn frame_derivative(&self, t: f64) -> (LVec3, LVec3) {
        null_frame_tangent(&self.eval(t), &self.derivative(t))
    }
}

/// Normalized linear interpolation between two directing vectors with
/// `u0·u1 >= 1`.
pub fn interp_path(u0: &LVec3, u1: &LVec3) -> Result<DirectingPath> {
    for u in [u0, u1] {
        let q = u.quadratic();
        if !u.is_finite() || (q - 1.0).abs() > UNIT_TOL {
            return Err(Error::InvalidEndpoints(format!("not unit spacelike (self-product {q})")));
        }
    }
    let d = u0.dot(u1);
    if d < 1.0 - PATH_TOL {
        return Err(Error::InvalidEndpoints(format!("u0·u1 = {d} < 1")));
    }
    Ok(DirectingPath::Interp { u0: *u0, u1: *u1 })
}

/// Outcome of a path or foliation check. Passing means every list is empty
/// and the endpoint residual is within tolerance.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub endpoint_residual: f64,
    pub endpoint_tolerance: f64,
    pub pairwise_disjoint_pairs: usize,
    /// Pairs `(t, s)` whose leaves are not certified disjoint (or, for paths,
    /// whose directions have product below one).
    pub failures: Vec<(f64, f64)>,
    pub derivative_cone_violations: Vec<f64>,
    pub orientation_violations: Vec<(f64, f64)>,
    pub norm_violations: Vec<f64>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
            && self.derivative_cone_violations.is_empty()
            && self.orientation_violations.is_empty()
            && self.norm_violations.is_empty()
            && self.endpoint_residual <= self.endpoint_tolerance
    }
}

fn grid(samples: usize) -> Vec<f64> {
    let last = (samples - 1) as f64;
    (0..samples).map(|i| if i + 1 == samples { 1.0 } else { i as f64 / last }).collect()
}

fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

/// `-u_t` and `u_s` are consistently oriented and not exactly opposite.
fn oriented_after(ut: &LVec3, us: &LVec3) -> bool {
    consistently_oriented(&-*ut, us, PAIR_TOL) && (*us - *ut).inf_norm() > PAIR_TOL
}

/// Checks unit norm, pairwise products `u_t·u_s >= 1` and the orientation
/// normalization on a uniform grid.
pub fn validate_path(path: &DirectingPath, grid_size: usize) -> ValidationReport {
    let grid_size = grid_size.max(2);
    let ts = grid(grid_size);
    let us: Vec<LVec3> = ts.iter().map(|&t| path.eval(t)).collect();
    let mut report = ValidationReport::default();
    for (t, u) in ts.iter().zip(&us) {
        if (u.quadratic() - 1.0).abs() > PATH_TOL {
            report.norm_violations.push(*t);
        }
    }
    for (i, j) in pairs(grid_size) {
        report.pairwise_disjoint_pairs += 1;
        if us[i].dot(&us[j]) < 1.0 - PATH_TOL {
            report.failures.push((ts[i], ts[j]));
        }
        if !oriented_after(&us[i], &us[j]) {
            report.orientation_violations.push((ts[i], ts[j]));
        }
    }
    report
}

/// `∫_0^1 (f(s) u_s^- - g(s) u_s^+) ds`.
pub fn displacement_integral<F, G>(path: &DirectingPath, f: F, g: G, quad_tol: f64) -> Result<LVec3>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    integrate_unit(
        |s| {
            let fr = path.frame(s);
            fr.u_minus * f(s) - fr.u_plus * g(s)
        },
        quad_tol,
    )
}

/// The four boundary rays of `A(-u_0, u_1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExtremeRay {
    /// `u_0^-`
    U0Minus,
    /// `u_1^-`
    U1Minus,
    /// `-u_0^+`
    U0PlusNeg,
    /// `-u_1^+`
    U1PlusNeg,
}

impl ExtremeRay {
    pub const ALL: [ExtremeRay; 4] =
        [ExtremeRay::U0Minus, ExtremeRay::U1Minus, ExtremeRay::U0PlusNeg, ExtremeRay::U1PlusNeg];

    /// The ray itself for the given path.
    pub fn target(self, path: &DirectingPath) -> LVec3 {
        let (f0, f1) = (path.frame(0.0), path.frame(1.0));
        match self {
            ExtremeRay::U0Minus => f0.u_minus,
            ExtremeRay::U1Minus => f1.u_minus,
            ExtremeRay::U0PlusNeg => -f0.u_plus,
            ExtremeRay::U1PlusNeg => -f1.u_plus,
        }
    }
}

/// Displacement for the concentrating weights `(n e^{-ns}, e^{-n})` and its
/// mirrored or role-exchanged variants; tends to the chosen ray as `n` grows.
pub fn extreme_ray_displacement(path: &DirectingPath, n: u32, ray: ExtremeRay) -> Result<LVec3> {
    if n == 0 {
        return Err(Error::InvalidParams("n must be at least 1".into()));
    }
    let nf = n as f64;
    let small = (-nf).exp();
    let early = move |s: f64| nf * (-nf * s).exp();
    let late = move |s: f64| nf * (-nf * (1.0 - s)).exp();
    let tiny = move |_: f64| small;
    match ray {
        ExtremeRay::U0Minus => displacement_integral(path, early, tiny, QUAD_TOL),
        ExtremeRay::U1Minus => displacement_integral(path, late, tiny, QUAD_TOL),
        ExtremeRay::U0PlusNeg => displacement_integral(path, tiny, early, QUAD_TOL),
        ExtremeRay::U1PlusNeg => displacement_integral(path, tiny, late, QUAD_TOL),
    }
}

/// Weights `f = c1 n e^{-ns} + c2 n e^{-n(1-s)} + c5 + delta` and
/// `g = c3 n e^{-ns} + c4 n e^{-n(1-s)} + c6 + delta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasisFamily {
    pub n: u32,
    pub coeffs: [f64; 6],
    pub delta: f64,
}

impl BasisFamily {
    /// Fails unless `n >= 1`, all coefficients are nonnegative and
    /// `delta > 0`.
    pub fn new(n: u32, coeffs: [f64; 6], delta: f64) -> Result<Self> {
        let b = BasisFamily { n, coeffs, delta };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || !self.coeffs.iter().all(|c| c.is_finite() && *c >= 0.0) || self.delta.is_nan() || self.delta <= 0.0 {
            return Err(Error::InvalidParams(format!("invalid basis family {self:?}")));
        }
        Ok(())
    }

    #[inline]
    fn bumps(&self, s: f64) -> (f64, f64) {
        let n = self.n as f64;
        (n * (-n * s).exp(), n * (-n * (1.0 - s)).exp())
    }

    pub fn f(&self, s: f64) -> f64 {
        let (a, b) = self.bumps(s);
        let c = &self.coeffs;
        c[0] * a + c[1] * b + c[4] + self.delta
    }

    pub fn g(&self, s: f64) -> f64 {
        let (a, b) = self.bumps(s);
        let c = &self.coeffs;
        c[2] * a + c[3] * b + c[5] + self.delta
    }
}

/// The vertex curve `p_t` with cached cumulative quadrature.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexCurve {
    basis: BasisFamily,
    p0: MinPoint,
    path: DirectingPath,
    breakpoints: Vec<f64>,
    cumulative: Vec<LVec3>,
}

impl VertexCurve {
    pub fn new(path: DirectingPath, basis: BasisFamily, p0: MinPoint, quad_tol: f64) -> Result<Self> {
        let (breakpoints, cumulative) = {
            let integrand = velocity_fn(&path, basis);
            let (_, breakpoints) = integrate_with_partition(&integrand, quad_tol)?;
            let mut cumulative = Vec::with_capacity(breakpoints.len());
            let mut acc = LVec3::ZERO;
            cumulative.push(acc);
            for w in breakpoints.windows(2) {
                acc += gauss_panel(&integrand, w[0], w[1]);
                cumulative.push(acc);
            }
            (breakpoints, cumulative)
        };
        Ok(VertexCurve { basis, p0, path, breakpoints, cumulative })
    }

    pub fn basis(&self) -> &BasisFamily {
        &self.basis
    }

    pub fn start(&self) -> MinPoint {
        self.p0
    }

    pub fn path(&self) -> &DirectingPath {
        &self.path
    }

    /// `p_t`; exactly `p_0` at `t = 0`.
    pub fn point(&self, t: f64) -> MinPoint {
        if t <= 0.0 {
            return self.p0;
        }
        let t = t.min(1.0);
        let i = match self.breakpoints.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
            Ok(i) => return self.p0 + self.cumulative[i],
            Err(i) => i - 1,
        };
        let integrand = velocity_fn(&self.path, self.basis);
        self.p0 + (self.cumulative[i] + gauss_panel(&integrand, self.breakpoints[i], t))
    }

    /// `dp_t/dt = f(t) u_t^- - g(t) u_t^+`.
    pub fn velocity(&self, t: f64) -> LVec3 {
        velocity_fn(&self.path, self.basis)(t)
    }

    pub fn end(&self) -> MinPoint {
        self.p0 + *self.cumulative.last().unwrap()
    }
}

fn velocity_fn(path: &DirectingPath, basis: BasisFamily) -> impl Fn(f64) -> LVec3 + '_ {
    move |s| {
        let fr = path.frame(s);
        fr.u_minus * basis.f(s) - fr.u_plus * basis.g(s)
    }
}

/// Knobs for [`solve_vertex_path`] and [`build_foliation`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Endpoint tolerance, relative to `1 + |p1 - p0|`.
    pub solver_tol: f64,
    /// Largest concentration tried.
    pub n_max: u32,
    pub quad_tol: f64,
    /// Grid used for the path precondition.
    pub path_grid: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { solver_tol: 1e-8, n_max: 60, quad_tol: QUAD_TOL, path_grid: 20 }
    }
}

/// Concentrations tried in order: 4, 8, 16, ... capped at `n_max`.
pub fn n_schedule(n_max: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut n = 4u32.min(n_max.max(1));
    loop {
        out.push(n);
        if n >= n_max {
            break;
        }
        n = (2 * n).min(n_max);
    }
    out
}

/// Fits a basis family whose displacement is `target`, without checking that
/// the path or endpoints satisfy the foliation hypotheses.
pub fn fit_vertex_curve(path: &DirectingPath, p0: MinPoint, target: LVec3, opts: &SolverOptions) -> Result<VertexCurve> {
    let scale = 1.0 + target.euclid_norm();
    let floor = 1e-6 * scale;
    let tol = opts.solver_tol * scale;
    let one = |_: f64| 1.0;
    let zero = |_: f64| 0.0;
    let flat_minus = displacement_integral(path, one, zero, opts.quad_tol)?;
    let flat_plus = displacement_integral(path, zero, one, opts.quad_tol)?;
    let floor_disp = (flat_minus + flat_plus) * floor;
    let rhs = target - floor_disp;

    let mut last = (f64::INFINITY, 0);
    for n in n_schedule(opts.n_max) {
        let nf = n as f64;
        let early = move |s: f64| nf * (-nf * s).exp();
        let late = move |s: f64| nf * (-nf * (1.0 - s)).exp();
        let columns = [
            displacement_integral(path, early, zero, opts.quad_tol)?,
            displacement_integral(path, late, zero, opts.quad_tol)?,
            displacement_integral(path, zero, early, opts.quad_tol)?,
            displacement_integral(path, zero, late, opts.quad_tol)?,
            flat_minus,
            flat_plus,
        ];
        let cols: Vec<Vec<f64>> = columns.iter().map(|c| c.to_array().to_vec()).collect();
        let sol = nnls(&cols, &rhs.to_array());
        last = (sol.residual, n);
        log::debug!("n = {n}: residual {:e}", sol.residual);
        if sol.residual > tol {
            continue;
        }
        let mut coeffs = [0.0; 6];
        coeffs.copy_from_slice(&sol.x);
        let basis = BasisFamily::new(n, coeffs, floor)?;
        let curve = VertexCurve::new(path.clone(), basis, p0, opts.quad_tol)?;
        let miss = (curve.end() - (p0 + target)).euclid_norm();
        if miss <= tol {
            return Ok(curve);
        }
        last = (miss, n);
    }
    Err(Error::Infeasible { residual: last.0, n: last.1 })
}

/// Finds a vertex curve from `p0` to `p1` along `path` whose velocity stays
/// in the open stem quadrant.
pub fn solve_vertex_path(path: &DirectingPath, p0: MinPoint, p1: MinPoint, opts: &SolverOptions) -> Result<VertexCurve> {
    let report = validate_path(path, opts.path_grid);
    if !report.passed() {
        return Err(Error::PreconditionFailed(format!(
            "directing path invalid: {} pair, {} orientation, {} norm violations",
            report.failures.len(),
            report.orientation_violations.len(),
            report.norm_violations.len()
        )));
    }
    let start = CrookedPlane::new(p0, path.start())?;
    let end = CrookedPlane::new(p1, path.end())?;
    let verdict = crooked_disjoint(&start, &end, DISJOINT_TOL);
    if verdict != Verdict::Disjoint {
        return Err(Error::PreconditionFailed(format!("endpoint planes not disjoint: {verdict:?}")));
    }
    fit_vertex_curve(path, p0, p1 - p0, opts)
}

/// A family of crooked planes `C(p_t, ±u_t)`, `t` in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct Foliation {
    path: DirectingPath,
    curve: VertexCurve,
    first: CrookedPlane,
    last: CrookedPlane,
    /// Sign relating the oriented path to the reported directions.
    output_sign: f64,
    solver_tol: f64,
}

impl Foliation {
    pub fn path(&self) -> &DirectingPath {
        &self.path
    }

    pub fn curve(&self) -> &VertexCurve {
        &self.curve
    }

    pub fn first(&self) -> &CrookedPlane {
        &self.first
    }

    pub fn last(&self) -> &CrookedPlane {
        &self.last
    }

    pub fn output_sign(&self) -> f64 {
        self.output_sign
    }

    pub fn solver_residual(&self) -> f64 {
        (self.curve.end() - self.last.vertex()).euclid_norm()
    }
}

/// Builds a crooked foliation from `p` to `q`.
///
/// The directing path interpolates `-eps1 u_p` to `eps2 u_q`, where
/// `(eps1, eps2)` is the sign choice orienting the pair; leaves report the
/// direction `-eps1 * (±u_t)` so that the first leaf is `p` itself.
pub fn build_foliation(p: &CrookedPlane, q: &CrookedPlane, opts: &SolverOptions) -> Result<Foliation> {
    match crooked_disjoint(p, q, DISJOINT_TOL) {
        Verdict::Disjoint => {}
        Verdict::DegenerateCase => return Err(Error::DegenerateCase),
        Verdict::Intersect | Verdict::Marginal => return Err(Error::NotDisjoint),
    }
    let signs = orient_pair(&p.direction(), &q.direction()).ok_or(Error::NotDisjoint)?;
    let u0 = -signs.eps1.apply(p.direction());
    let u1 = signs.eps2.apply(q.direction());
    let path = interp_path(&u0, &u1)?;
    let curve = solve_vertex_path(&path, p.vertex(), q.vertex(), opts)?;
    Ok(Foliation { path, curve, first: *p, last: *q, output_sign: -signs.eps1.value(), solver_tol: opts.solver_tol })
}

/// The leaf `C(p_t, u_t)`; at `t = 0` this is exactly the first input plane.
pub fn leaf(fol: &Foliation, t: f64) -> Result<CrookedPlane> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::OutOfRange(t));
    }
    if t == 0.0 {
        return Ok(fol.first);
    }
    let dir = fol.path.eval(t) * fol.output_sign;
    CrookedPlane::new(fol.curve.point(t), dir)
}

/// Certifies pairwise disjointness of the leaves on a uniform grid.
pub fn validate_foliation(fol: &Foliation, samples: usize) -> ValidationReport {
    let ts = grid(samples.max(2));
    let us: Vec<LVec3> = ts.iter().map(|&t| fol.path.eval(t)).collect();
    let ps: Vec<MinPoint> = ts.iter().map(|&t| fol.curve.point(t)).collect();
    let scale = 1.0 + (fol.last.vertex() - fol.first.vertex()).euclid_norm();

    let mut report = ValidationReport {
        endpoint_residual: fol.solver_residual(),
        endpoint_tolerance: fol.solver_tol * scale,
        ..Default::default()
    };

    let checks: Vec<(usize, usize, bool, bool)> = pairs(ts.len())
        .into_par_iter()
        .map(|(i, j)| {
            let oriented = oriented_after(&us[i], &us[j]);
            let disjoint = oriented
                && cone_a(&-us[i], &us[j])
                    .map(|hull| cone_contains(&hull, &(ps[j] - ps[i]), true, DISJOINT_TOL) == ConeMembership::In)
                    .unwrap_or(false);
            (i, j, oriented, disjoint)
        })
        .collect();
    for (i, j, oriented, disjoint) in checks {
        report.pairwise_disjoint_pairs += 1;
        if !oriented {
            report.orientation_violations.push((ts[i], ts[j]));
        }
        if !disjoint {
            report.failures.push((ts[i], ts[j]));
        }
    }

    for &t in &ts {
        let frame = fol.path.frame(t);
        if !stem_quadrant_contains(&fol.curve.velocity(t), &frame, true, MEMBERSHIP_TOL) {
            report.derivative_cone_violations.push(t);
        }
    }
    report
}

/// Builds a foliation value from parts without running the solver; used to
/// check the validator on hand-made curves.
pub fn foliation_from_parts(path: DirectingPath, curve: VertexCurve, first: CrookedPlane, last: CrookedPlane, output_sign: f64) -> Foliation {
    Foliation { path, curve, first, last, output_sign, solver_tol: SolverOptions::default().solver_tol }
}
