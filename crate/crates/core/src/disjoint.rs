//! Pairs of crooked planes: orientation normalization, the cone
//! `A(u, u') = int(V(u') - V(u))` and the disjointness verdict.

use serde::{Deserialize, Serialize};

use crate::cone::{cone_contains, ConeMembership, ConicalHull};
use crate::error::{Error, Result};
use crate::geometry::CrookedPlane;
use crate::lorentz::{null_frame, LVec3, UNIT_TOL};

/// Default tolerance for pair classification and orientation tests.
pub const PAIR_TOL: f64 = 1e-9;

/// Default relative tolerance of the disjointness cone test.
pub const DISJOINT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn apply(self, v: LVec3) -> LVec3 {
        match self {
            Sign::Plus => v,
            Sign::Minus => -v,
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Signs making `(eps1 u, eps2 u')` consistently oriented.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignChoice {
    pub eps1: Sign,
    pub eps2: Sign,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairClass {
    Ultraparallel,
    Asymptotic,
    Identical,
    OppositeIdentical,
    Crossing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Disjoint,
    Intersect,
    DegenerateCase,
    Marginal,
}

impl Verdict {
    /// Short lowercase name: `disjoint`, `intersect`, `degenerate`, `marginal`.
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Disjoint => "disjoint",
            Verdict::Intersect => "intersect",
            Verdict::DegenerateCase => "degenerate",
            Verdict::Marginal => "marginal",
        }
    }
}

/// `u·u' <= -1` and every mixed product `u_i·u_j^±` is non-positive.
pub fn consistently_oriented(u: &LVec3, u2: &LVec3, tol: f64) -> bool {
    let (Ok(f1), Ok(f2)) = (null_frame(u), null_frame(u2)) else {
        return false;
    };
    u.dot(u2) <= -1.0 + tol
        && u.dot(&f2.u_minus) <= tol
        && u.dot(&f2.u_plus) <= tol
        && u2.dot(&f1.u_minus) <= tol
        && u2.dot(&f1.u_plus) <= tol
}

/// First sign choice in the order `(+,+), (+,-), (-,+), (-,-)` that makes the
/// pair consistently oriented.
pub fn orient_pair(u: &LVec3, u2: &LVec3) -> Option<SignChoice> {
    orient_pair_tol(u, u2, PAIR_TOL)
}

pub fn orient_pair_tol(u: &LVec3, u2: &LVec3, tol: f64) -> Option<SignChoice> {
    const ORDER: [(Sign, Sign); 4] = [
        (Sign::Plus, Sign::Plus),
        (Sign::Plus, Sign::Minus),
        (Sign::Minus, Sign::Plus),
        (Sign::Minus, Sign::Minus),
    ];
    ORDER
        .iter()
        .find(|(a, b)| consistently_oriented(&a.apply(*u), &b.apply(*u2), tol))
        .map(|&(eps1, eps2)| SignChoice { eps1, eps2 })
}

fn check_unit(u: &LVec3) -> Result<()> {
    let q = u.quadratic();
    if !u.is_finite() || (q - 1.0).abs() > UNIT_TOL {
        return Err(Error::NotUnitSpacelike(q));
    }
    Ok(())
}

pub fn classify_pair(u: &LVec3, u2: &LVec3, eps_pair: f64) -> Result<PairClass> {
    check_unit(u)?;
    check_unit(u2)?;
    if (*u2 - *u).inf_norm() <= eps_pair {
        return Ok(PairClass::Identical);
    }
    if (*u2 + *u).inf_norm() <= eps_pair {
        return Ok(PairClass::OppositeIdentical);
    }
    if u.dot(u2).abs() < 1.0 - eps_pair {
        return Ok(PairClass::Crossing);
    }
    let Some(signs) = orient_pair_tol(u, u2, eps_pair) else {
        return Ok(PairClass::Crossing);
    };
    let d = signs.eps1.apply(*u).dot(&signs.eps2.apply(*u2));
    Ok(if d < -1.0 - eps_pair { PairClass::Ultraparallel } else { PairClass::Asymptotic })
}

/// The hull of `u'^-, -u'^+, -u^-, u^+`, whose interior is `A(u, u')`.
pub fn cone_a(u: &LVec3, u2: &LVec3) -> Result<ConicalHull> {
    check_unit(u)?;
    check_unit(u2)?;
    if !consistently_oriented(u, u2, PAIR_TOL) {
        return Err(Error::NotConsistentlyOriented);
    }
    let f1 = null_frame(u)?;
    let f2 = null_frame(u2)?;
    ConicalHull::new(vec![f2.u_minus, -f2.u_plus, -f1.u_minus, f1.u_plus])
}

/// Decides whether two crooked planes are disjoint.
///
/// Planes whose directions admit no consistent orientation always intersect.
/// Parallel directions are reported as [`Verdict::DegenerateCase`].
pub fn crooked_disjoint(p: &CrookedPlane, q: &CrookedPlane, tol: f64) -> Verdict {
    let (u, u2) = (p.direction(), q.direction());
    let Some(signs) = orient_pair(&u, &u2) else {
        return Verdict::Intersect;
    };
    if matches!(
        classify_pair(&u, &u2, PAIR_TOL),
        Ok(PairClass::Identical | PairClass::OppositeIdentical)
    ) {
        return Verdict::DegenerateCase;
    }
    let Ok(hull) = cone_a(&signs.eps1.apply(u), &signs.eps2.apply(u2)) else {
        return Verdict::DegenerateCase;
    };
    match cone_contains(&hull, &(q.vertex() - p.vertex()), true, tol) {
        ConeMembership::In => Verdict::Disjoint,
        ConeMembership::Out => Verdict::Intersect,
        ConeMembership::Marginal => Verdict::Marginal,
        ConeMembership::Degenerate => Verdict::DegenerateCase,
    }
}
