use thiserror::Error;

/// Errors raised anywhere in the pipeline.
///
/// Variants are grouped by the exit code the batch driver maps them to:
/// configuration problems, numerical failures and exceeded work budgets.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("u block of the Bogoliubov matrix is singular (condition estimate {condition:e}); reduce s_F or move the cut")]
    SingularU { condition: f64 },

    #[error("unphysical covariance: symplectic eigenvalue {value} below 1/2")]
    Unphysical { value: f64 },

    #[error("density matrix has eigenvalue {value:e} below the negativity tolerance")]
    NegativeSpectrum { value: f64 },

    #[error("squeeze kernel eigenvalue {value} has modulus at least 1; the full vacuum is not normalizable in the split space")]
    NonNormalizable { value: f64 },

    #[error("parameter outside the supported range: {0}")]
    Parameter(String),

    #[error("derivative order {order} exceeds the budget {budget}")]
    Budget { order: u32, budget: u32 },

    #[error("cache: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the batch driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Json(_) | Error::Parameter(_) => 2,
            Error::Budget { .. } => 4,
            Error::Io(_) | Error::Cache(_) | Error::Dimension(_) => 3,
            Error::SingularU { .. } | Error::NonNormalizable { .. } | Error::Unphysical { .. } | Error::NegativeSpectrum { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
