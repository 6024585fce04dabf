use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = GenutError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum GenutError {
    #[error("parameter `{param}` = {value} is outside its domain ({domain})")]
    ParameterDomain {
        param: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("component {index} has zero variance; the covariance would not be positive definite")]
    DegenerateVariance { index: usize },

    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("{what} contains a non-finite entry")]
    NonFinite { what: &'static str },

    #[error("matrix is not symmetric: |P[{row}][{col}] - P[{col}][{row}]| = {diff:e}")]
    NotSymmetric { row: usize, col: usize, diff: f64 },

    #[error("matrix is not positive definite: pivot {pivot} is {value:e}")]
    Factorization { pivot: usize, value: f64 },

    #[error("division by zero at index {index}")]
    DivisionByZero { index: usize },

    #[error("kurtosis matching is infeasible; per-element margins {margins:?}")]
    Infeasible { margins: Vec<f64> },

    #[error("v[{index}] = {value} is not positive")]
    InfeasibleV { index: usize, value: f64 },

    #[error("u[{index}] = {value} is not positive")]
    NonPositiveU { index: usize, value: f64 },

    #[error("mean component {index} = {mean} is not strictly inside ({lower}, {upper})")]
    MeanOutsideBounds {
        index: usize,
        mean: f64,
        lower: f64,
        upper: f64,
    },

    #[error("constraint repair left sigma point {point} outside the box")]
    ConstraintUnsatisfied { point: usize },

    #[error("transform produced a non-finite value at sigma point {index}")]
    Evaluation { index: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl GenutError {
    /// I/O failure at `path`.
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        GenutError::Io {
            path: path.into(),
            source,
        }
    }
}
