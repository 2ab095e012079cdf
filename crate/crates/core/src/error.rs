use thiserror::Error;

/// Errors raised anywhere in the estimation and simulation stack.
#[derive(Error, Debug)]
pub enum SieveError {
    #[error("basis index must be at least 1, got {0}")]
    ZeroIndex(usize),

    #[error("input {value} lies outside the domain [0, 1]")]
    Domain { value: f64 },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value produced at step {step} ({what})")]
    NonFinite { step: u64, what: &'static str },

    #[error("design matrix is rank deficient (rank {rank} < {columns} columns)")]
    SingularFit { rank: usize, columns: usize },

    #[error("not enough observations: need at least {needed}, got {found}")]
    TooFewObservations { needed: usize, found: usize },

    #[error("linear solve failed: {0}")]
    Solver(String),

    #[error("target has no known expansion in the {family} family")]
    NoKnownExpansion { family: &'static str },

    #[error("invalid value for `{key}`: {reason}")]
    InvalidConfig { key: String, reason: String },

    #[error("slope fit failed: {0}")]
    SlopeFit(String),

    #[error("replication {replication}, step {step}: {source}")]
    Replication {
        replication: usize,
        step: u64,
        #[source]
        source: Box<SieveError>,
    },

    #[error("snapshot error: {0}")]
    Snapshot(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl SieveError {
    pub fn invalid(key: impl Into<String>, reason: impl Into<String>) -> Self {
        SieveError::InvalidConfig {
            key: key.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, SieveError>;

pub(crate) fn check_unit(x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(SieveError::Domain { value: x })
    }
}
