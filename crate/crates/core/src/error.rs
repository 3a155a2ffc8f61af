use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by matrix construction, geometry, checkers and the harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),

    #[error("matrix has zero dimension")]
    Empty,

    #[error("dimension mismatch: {0}x{0} vs {1}x{1}")]
    DimensionMismatch(usize, usize),

    #[error("not Hermitian: asymmetry {asymmetry:e} exceeds tolerance {tolerance:e}")]
    NotHermitian { asymmetry: f64, tolerance: f64 },

    #[error("not positive definite: lambda_min {min:e} <= 1e-10 * lambda_max {max:e}")]
    NotPositiveDefinite { min: f64, max: f64 },

    #[error("eigensolver did not converge within the iteration cap of {cap}")]
    NoConvergence { cap: usize },

    #[error("spectral function undefined at eigenvalue {0:e}")]
    Domain(f64),

    #[error("conjugating matrix is numerically singular (condition estimate {0:e})")]
    Singular(f64),

    #[error("invalid Schatten exponent p = {0}")]
    InvalidExponent(f64),

    #[error("{checker}: p = {p} is outside its valid range {range}")]
    OutOfRange {
        checker: &'static str,
        p: f64,
        range: &'static str,
    },

    #[error("unproven-range: Hanner's inequality is only checked for p in [1, 4/3] or p = 3/2, got p = {0}")]
    UnprovenRange(f64),

    #[error("matrix is off the unit sphere: |delta_p(U, I) - 1| = {0:e}")]
    OffSphere(f64),

    #[error("cannot project the identity onto the unit sphere (no direction)")]
    NoDirection,

    #[error("random conjugator exceeded the condition bound after {0} attempts")]
    ConditioningFailed(usize),

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("negative entry {0:e} in a log-majorization argument")]
    NegativeEntry(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
