//! Composite Gauss-Legendre quadrature for vector-valued integrands on [0, 1].
//!
//! Panels are graded geometrically (ratio 1/2) toward both endpoints, where
//! the exponential weights `n e^{-ns}` and `n e^{-n(1-s)}` concentrate, and
//! each graded panel is split uniformly into `k` pieces. `k` doubles until two
//! successive results agree.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::lorentz::LVec3;

/// Default absolute tolerance per component.
pub const QUAD_TOL: f64 = 1e-10;

const ORDER: usize = 16;
const GRADED_LEVELS: usize = 4;
const MAX_SPLIT: usize = 1 << 12;

/// Gauss-Legendre nodes and weights on [-1, 1].
fn rule() -> &'static [(f64, f64); ORDER] {
    static RULE: OnceLock<[(f64, f64); ORDER]> = OnceLock::new();
    RULE.get_or_init(|| {
        let mut out = [(0.0, 0.0); ORDER];
        let n = ORDER as f64;
        for (i, slot) in out.iter_mut().enumerate() {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(ORDER, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(ORDER, x);
            if d != 0.0 {
                dp = d;
            }
            *slot = (x, 2.0 / ((1.0 - x * x) * dp * dp));
        }
        out
    })
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// One 16-point Gauss-Legendre panel over `[a, b]`.
pub fn gauss_panel<F: Fn(f64) -> LVec3>(f: &F, a: f64, b: f64) -> LVec3 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = LVec3::ZERO;
    for &(x, w) in rule() {
        acc += f(mid + half * x) * w;
    }
    acc * half
}

/// Breakpoints of the graded partition of [0, 1] with `split` uniform pieces
/// per graded panel.
pub fn graded_breakpoints(split: usize) -> Vec<f64> {
    let mut left = vec![0.0];
    for level in (0..GRADED_LEVELS).rev() {
        left.push(0.5 * 0.5f64.powi(level as i32));
    }
    let mut pts = Vec::with_capacity(2 * GRADED_LEVELS * split + 1);
    pts.push(0.0);
    for w in left.windows(2) {
        for j in 1..=split {
            pts.push(w[0] + (w[1] - w[0]) * j as f64 / split as f64);
        }
    }
    let n_left = pts.len();
    for i in (0..n_left - 1).rev() {
        pts.push(1.0 - pts[i]);
    }
    pts
}

fn composite<F: Fn(f64) -> LVec3>(f: &F, pts: &[f64]) -> LVec3 {
    pts.windows(2).fold(LVec3::ZERO, |acc, w| acc + gauss_panel(f, w[0], w[1]))
}

/// `∫_0^1 f(s) ds` with absolute error about `tol` per component.
pub fn integrate_unit<F: Fn(f64) -> LVec3>(f: F, tol: f64) -> Result<LVec3> {
    integrate_with_partition(&f, tol).map(|(v, _)| v)
}

/// Like [`integrate_unit`], also returning the converged partition.
pub fn integrate_with_partition<F: Fn(f64) -> LVec3>(f: &F, tol: f64) -> Result<(LVec3, Vec<f64>)> {
    let mut split = 1;
    let mut pts = graded_breakpoints(split);
    let mut prev = composite(f, &pts);
    let mut change = f64::INFINITY;
    while split < MAX_SPLIT {
        split *= 2;
        let next_pts = graded_breakpoints(split);
        let next = composite(f, &next_pts);
        change = (next - prev).inf_norm();
        pts = next_pts;
        prev = next;
        if change <= tol {
            return Ok((prev, pts));
        }
    }
    Err(Error::QuadratureFailure(change))
}
