use thiserror::Error;

/// Errors raised by the exact, numeric and harness layers.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The request would exceed the configured memory budget.
    #[error("resource limit: {0}")]
    ResourceLimit(String),

    /// An iterative solver failed to reach its tolerance.
    #[error("no convergence after {iterations} iterations: {what}")]
    NonConvergence { what: String, iterations: usize },

    /// A run configuration failed validation.
    #[error("invalid configuration: {0}")]
    Validation(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serialize(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Validation(_) | Error::ResourceLimit(_) => 2,
            Error::NonConvergence { .. } => 3,
            Error::Io(_) | Error::Serialize(_) => 4,
        }
    }

    /// Short machine-readable tag used in output rows.
    pub fn tag(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::ResourceLimit(_) => "resource",
            Error::NonConvergence { .. } => "nonconvergence",
            Error::Validation(_) => "validation",
            Error::Io(_) => "io",
            Error::Serialize(_) => "serialize",
        }
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            other => Error::Serialize(format!("{other:?}")),
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        if e.is_io() {
            Error::Io(e.into())
        } else {
            Error::Serialize(e.to_string())
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
