use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the region where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A parameter violates an operation's contract (e.g. a non-positive scale factor).
    #[error("parameter error: {0}")]
    Parameter(String),

    /// Two evaluation paths disagree, or a numerical routine ran out of budget.
    #[error("accuracy error: {what} (primary {primary:e}, check {check:e})")]
    Accuracy {
        what: String,
        primary: f64,
        check: f64,
    },

    /// The integrand returned a non-finite value inside the integration interval.
    #[error("integrand is not finite at x = {abscissa:e} (value {value})")]
    NonFiniteIntegrand { abscissa: f64, value: f64 },

    /// A theorem hypothesis could not be certified for the instance.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// The sweep configuration is unusable.
    #[error("configuration error: {0}")]
    Config(String),

    /// Function specification text could not be parsed.
    #[error("cannot parse function spec {text:?}: {reason}")]
    Parse { text: String, reason: String },

    #[error("I/O error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
