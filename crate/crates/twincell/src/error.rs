//! Error type shared by every module of the crate.
//!
//! All fallible operations return [`Result`]. Domain violations (a rate
//! outside its admissible interval, a non-positive load) are reported as
//! [`Error::Domain`] with a human-readable description rather than a panic,
//! so callers sweeping over parameter grids can skip bad points and keep
//! going.

use thiserror::Error;

/// Crate-wide error enumeration.
#[derive(Debug, Error)]
pub enum Error {
    /// An input parameter lies outside the domain of the requested quantity.
    #[error("parameter out of domain: {0}")]
    Domain(String),

    /// An iterative solver exhausted its iteration budget.
    #[error("solver did not converge after {iterations} iterations (last residual {residual:.3e})")]
    Convergence { iterations: usize, residual: f64 },

    /// The explicit random-codebook quantizer is capped to keep the codebook
    /// enumerable in memory; larger budgets must use the statistical sampler.
    #[error("explicit codebook quantization supports at most {cap} bits, got {bits}; use the statistical quantizer instead")]
    ExplicitBits { bits: u32, cap: u32 },

    /// A configuration file or flag combination could not be interpreted.
    #[error("configuration error: {0}")]
    Config(String),

    /// A result set was empty, so there is nothing to write.
    #[error("empty result set; no output written")]
    EmptyResults,

    /// File system failure while reading or writing.
    #[error("i/o failure for {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Builds a [`Error::Domain`] from anything printable.
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Builds a [`Error::Config`] from anything printable.
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
