use thiserror::Error;

/// Errors produced by the numerical kernels and the physics assembly.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error in {what}: {detail}")]
    Domain { what: &'static str, detail: String },

    #[error("degenerate channel: virtual-state gap {gap:e} is zero or below {threshold:e}")]
    Degenerate { gap: f64, threshold: f64 },

    #[error("out of regime: {detail}")]
    OutOfRegime { detail: String },

    #[error("no convergence in {what} after {iterations} steps (last error estimate {estimate:e})")]
    Convergence {
        what: &'static str,
        iterations: usize,
        estimate: f64,
    },

    #[error("branch tracking ambiguous at z = {z}: overlaps {first} and {second}")]
    Tracking { z: f64, first: f64, second: f64 },

    #[error("no root bracketed for {what} in [{lo}, {hi}]")]
    NoRoot { what: String, lo: f64, hi: f64 },

    #[error("configuration error: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn domain(what: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            what,
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
