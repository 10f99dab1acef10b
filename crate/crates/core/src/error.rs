use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("capacity exceeded: {requested} bytes requested, memory budget is {budget} bytes")]
    Capacity { requested: u64, budget: u64 },

    #[error("{n} is outside the table range [{lo}, {hi}]")]
    OutOfRange { n: u64, lo: u64, hi: u64 },

    /// A weak Goldbach counterexample candidate. Never swallow this one.
    #[error("no odd-prime triple found for n = {0}")]
    NoTripleFound(u64),

    #[error("complexity guard: {0}")]
    Complexity(String),

    #[error("corrupt {kind} file {path}: {reason}")]
    Corrupt {
        kind: &'static str,
        path: PathBuf,
        reason: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
