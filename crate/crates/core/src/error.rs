use thiserror::Error;

/// Errors raised by the apportionment toolkit.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("matrix is singular or numerically rank deficient (reciprocal condition {rcond:.3e})")]
    Singular { rcond: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("cannot complete inverse pair: {0}")]
    SingularCompletion(String),

    #[error("unsupported order {order}: {reason}")]
    UnsupportedOrder { order: usize, reason: String },

    #[error("constant {kappa} is below the minimum {minimum} of K(A) = {set}")]
    BelowMinimum { kappa: f64, minimum: f64, set: String },

    #[error("constant {kappa} must exceed {threshold} (construction only covers {set})")]
    BelowThreshold { kappa: f64, threshold: f64, set: String },

    #[error("out of scope: {0}")]
    OutOfScope(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("constant {kappa} is not achievable; K(A) = {set}")]
    ConstantNotAchievable { kappa: f64, set: String },

    #[error("matrix is not apportionable: {0}")]
    NotApportionable(String),

    #[error("apportionability is unknown: {0}")]
    Unknown(String),

    #[error("search budget exceeded: {0}")]
    Budget(String),

    #[error("certificate failed verification: {0}")]
    Verification(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
