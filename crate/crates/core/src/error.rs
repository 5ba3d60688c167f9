use thiserror::Error;

/// Errors raised by the numerical routines and the Monte Carlo oracle.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("{routine} did not converge: {detail}")]
    NonConvergence {
        routine: &'static str,
        detail: String,
    },

    #[error("correlation structure is not positive semidefinite (pivot {pivot} = {value:e})")]
    NotPositiveSemidefinite { pivot: usize, value: f64 },

    #[error("pairing has {got} entries, expected {expected}")]
    PairingLength { expected: u64, got: usize },

    #[error("dataset error on line {line}: {message}")]
    Dataset { line: usize, message: String },

    #[error("no positive {bound} bound found for k <= {limit}")]
    SearchExhausted { bound: &'static str, limit: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(message: impl Into<String>) -> Result<T> {
    Err(Error::Domain(message.into()))
}
