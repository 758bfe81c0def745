use num_complex::Complex64;
use thiserror::Error;

use crate::gauss_equation::ConformalFactorField;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate matrix: determinant {0} cannot be normalized")]
    DegenerateMatrix(Complex64),

    #[error("no isolated fixed points: transformation is the identity")]
    NoIsolatedFixedPoints,

    #[error("Hausdorff distance undefined for empty set")]
    EmptySample,

    #[error("point {0} lies outside the domain")]
    Domain(Complex64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("not in almost-Fuchsian regime: sup of the hyperbolic norm is {sup} (at {at})")]
    NotAlmostFuchsian { sup: f64, at: Complex64 },

    #[error("solver failure after {iterations} Newton steps (residual {residual:e})")]
    SolverFailure {
        iterations: usize,
        residual: f64,
        last_iterate: Box<ConformalFactorField>,
    },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("degenerate node {index}: {reason}")]
    DegenerateNode { index: usize, reason: String },

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
