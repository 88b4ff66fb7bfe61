use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Input data is malformed (non-finite entries, wrong shape, bad JSON).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested quadrature cannot resolve the requested truncation.
    #[error("under-resolved quadrature: {0}")]
    UnderResolved(String),

    /// A numerical procedure failed or produced a residual above tolerance.
    #[error("numerical failure: {0}")]
    Numeric(String),

    /// A configured resource cap would be exceeded.
    #[error("resource limit: {0}")]
    ResourceLimit(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by the caller's input rather than the numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput(_)
                | Error::DimensionMismatch { .. }
                | Error::Domain(_)
                | Error::UnderResolved(_)
                | Error::Json(_)
                | Error::ResourceLimit(_)
                | Error::Io(_)
        )
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid_input",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::Domain(_) => "domain",
            Error::UnderResolved(_) => "under_resolved",
            Error::Numeric(_) => "numeric",
            Error::ResourceLimit(_) => "resource_limit",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
