use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the domain of a function.
    #[error("{name} = {value} is outside the domain: {reason}")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    /// No finite AP density reaches the target, since even an unloaded
    /// serving cell (mean load 1) leaves the average MSE above it.
    #[error("target MSE {target} is not above the asymptotic MSE {asymptotic}; no finite AP density suffices")]
    InfeasibleTarget { target: f64, asymptotic: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("root is not bracketed: f({lo}) = {f_lo} and f({hi}) = {f_hi} have the same sign")]
    Bracket {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("empirical distribution needs at least one sample")]
    EmptySample,

    #[error("association needs at least one access point")]
    NoAccessPoints,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },

    /// Every violated invariant, one entry each.
    #[error("validation failed:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::Domain {
            name,
            value,
            reason,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
