use thiserror::Error;

/// Errors produced by the kernel.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite coordinate in {0}")]
    NonFinite(&'static str),
    #[error("vector is not spacelike (self-product {0})")]
    NotSpacelike(f64),
    #[error("vector is not unit spacelike (self-product {0})")]
    NotUnitSpacelike(f64),
    #[error("directions are not consistently oriented")]
    NotConsistentlyOriented,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("invalid path endpoints: {0}")]
    InvalidEndpoints(String),
    #[error("quadrature did not converge (last change {0:e})")]
    QuadratureFailure(f64),
    #[error("target displacement not reached (residual {residual:e} at n = {n})")]
    Infeasible { residual: f64, n: u32 },
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("crooked planes are not disjoint")]
    NotDisjoint,
    #[error("directions are parallel; disjointness criterion does not apply")]
    DegenerateCase,
    #[error("parameter {0} outside [0, 1]")]
    OutOfRange(f64),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
