//! Finitely generated convex cones in R^3.
//!
//! Everything here is Euclidean: facet normals come from Euclidean cross
//! products and membership is a sign test on Euclidean dot products. The
//! Lorentzian form never enters.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lorentz::{det3, LVec3};

/// Numerical rank tolerance on normalized generators.
pub const RANK_TOL: f64 = 1e-9;

const FACET_EPS: f64 = 1e-12;

/// Conical hull of a finite set of generators.
#[derive(Debug, Clone, PartialEq)]
pub struct ConicalHull {
    generators: Vec<LVec3>,
    extreme_rays: Vec<LVec3>,
    facet_normals: Vec<LVec3>,
    rank: usize,
}

/// Outcome of a cone membership query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConeMembership {
    In,
    Out,
    Marginal,
    /// The hull has rank below three, so its interior in R^3 is empty.
    Degenerate,
}

impl ConicalHull {
    pub fn new(generators: Vec<LVec3>) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::InvalidParams("cone needs at least one generator".into()));
        }
        if generators.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFinite("cone generator"));
        }
        let units: Vec<Option<LVec3>> = generators
            .iter()
            .map(|g| {
                let n = g.euclid_norm();
                (n > 0.0).then(|| *g * (1.0 / n))
            })
            .collect();
        let nonzero: Vec<LVec3> = units.iter().flatten().copied().collect();
        let rank = numerical_rank(&nonzero);

        let facet_normals = if rank == 3 { facets(&nonzero) } else { Vec::new() };

        let mut extreme_rays: Vec<LVec3> = Vec::new();
        for (g, unit) in generators.iter().zip(&units) {
            let Some(unit) = unit else { continue };
            let on_facets = facet_normals.iter().filter(|n| n.euclid_dot(unit).abs() <= 1e-10).count();
            let extreme = rank < 3 || facet_normals.is_empty() || on_facets >= 2;
            let duplicate = extreme_rays
                .iter()
                .any(|r| (r.euclid_normalized() - *unit).euclid_norm() <= RANK_TOL);
            if extreme && !duplicate {
                extreme_rays.push(*g);
            }
        }

        Ok(ConicalHull { generators, extreme_rays, facet_normals, rank })
    }

    pub fn generators(&self) -> &[LVec3] {
        &self.generators
    }

    pub fn extreme_rays(&self) -> &[LVec3] {
        &self.extreme_rays
    }

    /// Unit normals, inward positive.
    pub fn facet_normals(&self) -> &[LVec3] {
        &self.facet_normals
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Sum of the generators; interior whenever the hull has full rank.
    pub fn generator_sum(&self) -> LVec3 {
        self.generators.iter().fold(LVec3::ZERO, |acc, g| acc + *g)
    }

    /// Smallest facet value `n·x / |x|`; positive means interior.
    pub fn margin(&self, x: &LVec3) -> f64 {
        let scale = x.euclid_norm();
        if scale == 0.0 {
            return 0.0;
        }
        self.facet_normals
            .iter()
            .map(|n| n.euclid_dot(x) / scale)
            .fold(f64::INFINITY, f64::min)
    }
}

fn numerical_rank(units: &[LVec3]) -> usize {
    if units.is_empty() {
        return 0;
    }
    let mut rank = 1;
    for i in 0..units.len() {
        for j in i + 1..units.len() {
            if units[i].euclid_cross(&units[j]).euclid_norm() > RANK_TOL {
                rank = 2;
                for k in j + 1..units.len() {
                    if det3(&units[i], &units[j], &units[k]).abs() > RANK_TOL {
                        return 3;
                    }
                }
            }
        }
    }
    rank
}

fn facets(units: &[LVec3]) -> Vec<LVec3> {
    let mut out: Vec<LVec3> = Vec::new();
    for i in 0..units.len() {
        for j in i + 1..units.len() {
            let c = units[i].euclid_cross(&units[j]);
            if c.euclid_norm() <= RANK_TOL {
                continue;
            }
            let n = c.euclid_normalized();
            let dots: Vec<f64> = units.iter().map(|g| n.euclid_dot(g)).collect();
            let normal = if dots.iter().all(|&d| d >= -FACET_EPS) {
                n
            } else if dots.iter().all(|&d| d <= FACET_EPS) {
                -n
            } else {
                continue;
            };
            if !out.iter().any(|m| (*m - normal).euclid_norm() <= RANK_TOL) {
                out.push(normal);
            }
        }
    }
    out
}

/// Membership of `x` in the hull; `strict` asks for the interior.
///
/// The tolerance band is `tol |x|` on each unit facet normal.
pub fn cone_contains(hull: &ConicalHull, x: &LVec3, strict: bool, tol: f64) -> ConeMembership {
    if hull.rank < 3 {
        return ConeMembership::Degenerate;
    }
    let band = tol * x.euclid_norm();
    let worst = hull
        .facet_normals
        .iter()
        .map(|n| n.euclid_dot(x))
        .fold(f64::INFINITY, f64::min);
    if strict {
        if worst > band {
            ConeMembership::In
        } else if worst >= -band {
            ConeMembership::Marginal
        } else {
            ConeMembership::Out
        }
    } else if worst >= -band {
        ConeMembership::In
    } else {
        ConeMembership::Out
    }
}
