//! Lorentzian linear algebra on R^{2,1}.
//!
//! The form is `x1 y1 + x2 y2 - x3 y3` and the orientation is the one given by
//! the standard basis. Euclidean helpers (`euclid_*`) live here as well but are
//! kept under separate names: cone combinatorics are Euclidean, causal notions
//! are Lorentzian, and the two must not be confused.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default absolute tolerance for causal classification.
pub const EPS_CLASS: f64 = 1e-12;

/// Tolerance on `u·u = 1` accepted by [`null_frame`].
pub const UNIT_TOL: f64 = 1e-9;

/// A vector of R^{2,1}.
#[derive(Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct LVec3 {
    x: f64,
    y: f64,
    z: f64,
}

impl LVec3 {
    pub const ZERO: LVec3 = LVec3::raw(0.0, 0.0, 0.0);
    pub const E1: LVec3 = LVec3::raw(1.0, 0.0, 0.0);
    pub const E2: LVec3 = LVec3::raw(0.0, 1.0, 0.0);
    pub const E3: LVec3 = LVec3::raw(0.0, 0.0, 1.0);

    /// Builds a vector, rejecting NaN and infinite components.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        if x.is_finite() && y.is_finite() && z.is_finite() {
            Ok(Self::raw(x, y, z))
        } else {
            Err(Error::NonFinite("LVec3"))
        }
    }

    pub(crate) const fn raw(x: f64, y: f64, z: f64) -> Self {
        LVec3 { x, y, z }
    }

    #[inline]
    pub fn x(&self) -> f64 {
        self.x
    }
    #[inline]
    pub fn y(&self) -> f64 {
        self.y
    }
    #[inline]
    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Lorentzian inner product.
    #[inline]
    pub fn dot(&self, other: &LVec3) -> f64 {
        lorentz_dot(self, other)
    }

    /// Lorentzian cross product.
    #[inline]
    pub fn cross(&self, other: &LVec3) -> LVec3 {
        lorentz_cross(self, other)
    }

    /// Lorentzian self-product `v·v`.
    #[inline]
    pub fn quadratic(&self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn euclid_dot(&self, other: &LVec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    #[inline]
    pub fn euclid_cross(&self, other: &LVec3) -> LVec3 {
        LVec3::raw(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    #[inline]
    pub fn euclid_norm(&self) -> f64 {
        self.euclid_dot(self).sqrt()
    }

    /// Max-norm, used to scale tolerances.
    #[inline]
    pub fn inf_norm(&self) -> f64 {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }

    pub fn euclid_normalized(&self) -> LVec3 {
        *self * (1.0 / self.euclid_norm())
    }

    /// Rotation by `theta` about the timelike axis e3.
    pub fn rotate_e3(&self, theta: f64) -> LVec3 {
        let (s, c) = theta.sin_cos();
        LVec3::raw(c * self.x - s * self.y, s * self.x + c * self.y, self.z)
    }
}

impl TryFrom<[f64; 3]> for LVec3 {
    type Error = Error;
    fn try_from(a: [f64; 3]) -> Result<Self> {
        LVec3::new(a[0], a[1], a[2])
    }
}

impl From<LVec3> for [f64; 3] {
    fn from(v: LVec3) -> Self {
        v.to_array()
    }
}

impl fmt::Debug for LVec3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}, {:?}, {:?})", self.x, self.y, self.z)
    }
}

impl Add for LVec3 {
    type Output = LVec3;
    #[inline]
    fn add(self, o: LVec3) -> LVec3 {
        LVec3::raw(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for LVec3 {
    #[inline]
    fn add_assign(&mut self, o: LVec3) {
        *self = *self + o;
    }
}

impl Sub for LVec3 {
    type Output = LVec3;
    #[inline]
    fn sub(self, o: LVec3) -> LVec3 {
        LVec3::raw(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for LVec3 {
    type Output = LVec3;
    #[inline]
    fn neg(self) -> LVec3 {
        LVec3::raw(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for LVec3 {
    type Output = LVec3;
    #[inline]
    fn mul(self, k: f64) -> LVec3 {
        LVec3::raw(k * self.x, k * self.y, k * self.z)
    }
}

impl Mul<LVec3> for f64 {
    type Output = LVec3;
    #[inline]
    fn mul(self, v: LVec3) -> LVec3 {
        v * self
    }
}

/// Causal character of a vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CausalClass {
    Spacelike,
    Timelike,
    Null,
    Zero,
}

impl CausalClass {
    /// Timelike or null.
    pub fn is_causal(self) -> bool {
        matches!(self, CausalClass::Timelike | CausalClass::Null)
    }
}

#[inline]
pub fn lorentz_dot(u: &LVec3, v: &LVec3) -> f64 {
    u.x * v.x + u.y * v.y - u.z * v.z
}

/// Satisfies `(u × v)·w = det(u, v, w)` for the Lorentzian product.
#[inline]
pub fn lorentz_cross(u: &LVec3, v: &LVec3) -> LVec3 {
    LVec3::raw(
        u.y * v.z - u.z * v.y,
        u.z * v.x - u.x * v.z,
        u.y * v.x - u.x * v.y,
    )
}

/// Determinant of the matrix with rows `a`, `b`, `c`.
#[inline]
pub fn det3(a: &LVec3, b: &LVec3, c: &LVec3) -> f64 {
    a.x * (b.y * c.z - b.z * c.y) - a.y * (b.x * c.z - b.z * c.x) + a.z * (b.x * c.y - b.y * c.x)
}

pub fn classify_vector(v: &LVec3, eps_class: f64) -> CausalClass {
    let scale = v.inf_norm();
    if scale <= eps_class {
        return CausalClass::Zero;
    }
    let q = v.quadratic();
    if q.abs() <= eps_class * scale * scale {
        CausalClass::Null
    } else if q > 0.0 {
        CausalClass::Spacelike
    } else {
        CausalClass::Timelike
    }
}

/// Rescales a spacelike vector to unit Lorentzian length.
pub fn normalize_spacelike(v: &LVec3) -> Result<LVec3> {
    let q = v.quadratic();
    if q.is_nan() || q <= EPS_CLASS {
        return Err(Error::NotSpacelike(q));
    }
    Ok(*v * (1.0 / q.sqrt()))
}

/// A unit spacelike `u` together with its normalized null companions.
///
/// `(u, u_minus, u_plus)` is a positively oriented basis with
/// `u_minus·u_plus = -1`, all other cross products vanishing, and the two
/// null vectors sharing the same positive third coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NullFrame {
    pub u: LVec3,
    pub u_minus: LVec3,
    pub u_plus: LVec3,
}

impl NullFrame {
    /// Coefficients `(alpha, beta, gamma)` with
    /// `v = alpha u + beta u_minus + gamma u_plus`.
    #[inline]
    pub fn coords(&self, v: &LVec3) -> (f64, f64, f64) {
        (v.dot(&self.u), -v.dot(&self.u_plus), -v.dot(&self.u_minus))
    }

    #[inline]
    pub fn combine(&self, alpha: f64, beta: f64, gamma: f64) -> LVec3 {
        alpha * self.u + beta * self.u_minus + gamma * self.u_plus
    }
}

/// Extends a unit spacelike vector to its normalized null frame.
///
/// Writing `u = (r cos t, r sin t, h)` with `r^2 - h^2 = 1`, the companions are
/// the e3-rotation by `t` of `(h, ±1, r)/√2`, which is closed form and has no
/// singularity since `r ≥ 1`.
pub fn null_frame(u: &LVec3) -> Result<NullFrame> {
    if !u.is_finite() {
        return Err(Error::NonFinite("null_frame"));
    }
    let q = u.quadratic();
    if (q - 1.0).abs() > UNIT_TOL {
        return Err(Error::NotUnitSpacelike(q));
    }
    let (a, b) = null_pair(u);
    let (u_minus, u_plus) = if det3(u, &a, &b) >= 0.0 { (a, b) } else { (b, a) };
    Ok(NullFrame { u: *u, u_minus, u_plus })
}

#[inline]
fn null_pair(u: &LVec3) -> (LVec3, LVec3) {
    let (x, y, h) = (u.x, u.y, u.z);
    let r = x.hypot(y);
    let k = std::f64::consts::FRAC_1_SQRT_2 / r;
    let minus = LVec3::raw((h * x - y) * k, (h * y + x) * k, r * std::f64::consts::FRAC_1_SQRT_2);
    let plus = LVec3::raw((h * x + y) * k, (h * y - x) * k, r * std::f64::consts::FRAC_1_SQRT_2);
    (minus, plus)
}

/// Derivatives `(d u_minus, d u_plus)` of the null frame along a tangent `du`
/// at the unit spacelike vector `u`.
pub fn null_frame_tangent(u: &LVec3, du: &LVec3) -> (LVec3, LVec3) {
    let (x, y, h) = (u.x, u.y, u.z);
    let (dx, dy, dh) = (du.x, du.y, du.z);
    let r = x.hypot(y);
    let dr = (x * dx + y * dy) / r;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let q = |num: f64, dnum: f64| s * (dnum / r - num * dr / (r * r));
    let d_minus = LVec3::raw(
        q(h * x - y, dh * x + h * dx - dy),
        q(h * y + x, dh * y + h * dy + dx),
        s * dr,
    );
    let d_plus = LVec3::raw(
        q(h * x + y, dh * x + h * dx + dy),
        q(h * y - x, dh * y + h * dy - dx),
        s * dr,
    );
    (d_minus, d_plus)
}
