use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, BrightError>;

#[derive(Debug, Error)]
pub enum BrightError {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("malformed record for variant '{variant}': {message}")]
    MalformedRecord { variant: String, message: String },

    #[error("missing column '{0}'")]
    MissingColumn(String),

    #[error("duplicate variant id '{0}'")]
    DuplicateVariant(String),

    #[error("no variants")]
    NoVariants,

    #[error("variant '{0}' is monomorphic (zero sample variance)")]
    Monomorphic(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("variant sets do not align: {0}")]
    Alignment(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid scenario: {0}")]
    Scenario(String),

    #[error(
        "non-positive LD diagonal at variant index {index} ({value}); \
         apply diagonal loading (--diag-load) to restore a positive diagonal"
    )]
    NonPositiveDiagonal { index: usize, value: f64 },

    #[error(
        "coordinate descent diverged at eta={eta}, lambda={lambda}: |beta[{index}]| exceeded {bound} \
         after {sweeps} sweeps; the thresholded LD matrix is likely not positive semidefinite. \
         Use diagonal loading (--diag-load) or a larger tau"
    )]
    Divergence {
        eta: f64,
        lambda: f64,
        index: usize,
        bound: f64,
        sweeps: usize,
    },

    #[error("objective increased from {before} to {after} at sweep {sweep}")]
    DescentViolation {
        sweep: usize,
        before: f64,
        after: f64,
    },

    #[error("criterion unavailable: {0}")]
    Criterion(String),
}

impl BrightError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        BrightError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        BrightError::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}
