use thiserror::Error;

use crate::engine::SolveReport;
use crate::validate::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("{path}:{line}: {message}")]
    Format {
        path: String,
        line: u64,
        message: String,
    },

    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),

    #[error("duplicate taxpayer `{0}`")]
    DuplicateTaxpayer(String),

    #[error("duplicate ownership record `{owned}` <- `{owner}`")]
    DuplicateShare { owned: String, owner: String },

    #[error("unknown taxpayer `{0}`")]
    UnknownTaxpayer(String),

    #[error("`{0}` is not a corporation")]
    NotACorporation(String),

    #[error("income vector has {found} entries, network has {expected} taxpayers")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("infeasible generator configuration: {0}")]
    Infeasible(String),

    #[error("CAP_EXCEEDED: transient system of size {size} exceeds dense cap {cap}")]
    CapExceeded { size: usize, cap: usize },

    #[error("ABSORBING_SUBSET: {size} transient corporations contain a closed set (rcond {rcond:e})")]
    AbsorbingSubset { size: usize, rcond: f64 },

    #[error("NON_CONVERGED: max corporate income {max_income} >= epsilon {epsilon} after {} iterations", report.outer_iterations)]
    NonConverged {
        max_income: f64,
        epsilon: f64,
        report: Box<SolveReport>,
    },

    #[error("REDO_OVERFLOW: component of size {size} needed more than {limit} passes")]
    RedoOverflow { size: usize, limit: usize },

    #[error("network failed validation with {} error(s)", .0.error_count())]
    Validation(Box<ValidationReport>),

    #[error("verification mismatch: deviation {deviation:e} exceeds tolerance {tolerance:e}")]
    VerificationMismatch { deviation: f64, tolerance: f64 },
}

impl Error {
    /// Process exit code used by the command-line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation(_) => 1,
            Error::CapExceeded { .. }
            | Error::AbsorbingSubset { .. }
            | Error::NonConverged { .. }
            | Error::RedoOverflow { .. } => 2,
            Error::VerificationMismatch { .. } => 4,
            _ => 3,
        }
    }
}
