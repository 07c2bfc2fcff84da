//! Error type shared across the crate.

use std::path::PathBuf;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io: {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Malformed row in a CSV or config file; `line` is 1-based.
    #[error("parse: {path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    /// Model data that parses but violates an invariant.
    #[error("validation: {0}")]
    Validation(String),

    #[error("instability: spectral radius {spectral_radius} >= 1 - 1e-9")]
    Unstable { spectral_radius: f64 },

    #[error("overflow: |theta| exceeded {cap:e} at node {node}, step {step}")]
    Overflow { node: usize, step: usize, cap: f64 },

    #[error("estimation: max_lag {max_lag} too large for {n_samples} samples (need max_lag < n_samples/4)")]
    LagTooLarge { max_lag: usize, n_samples: usize },

    #[error("estimation: normal equations singular for target node {node} (after ridge retry)")]
    SingularSystem { node: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("spectral: model spectrum singular at omega = {omega}")]
    SingularSpectrum { omega: f64 },

    #[error("topology: missing frequency response for pair ({from}, {to})")]
    MissingResponse { from: usize, to: usize },

    #[error("topology: node count mismatch between truth ({expected}) and estimate ({actual})")]
    NodeSetMismatch { expected: usize, actual: usize },

    #[error("config: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    /// Short category tag used by the command-line front end for exit messages.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Io { .. } => "io",
            Error::Parse { .. } => "parse",
            Error::Validation(_) => "validation",
            Error::Unstable { .. } => "instability",
            Error::Overflow { .. } => "overflow",
            Error::LagTooLarge { .. } | Error::SingularSystem { .. } => "estimation",
            Error::DimensionMismatch { .. } => "dimension",
            Error::SingularSpectrum { .. } => "spectral",
            Error::MissingResponse { .. } | Error::NodeSetMismatch { .. } => "topology",
            Error::Config(_) => "config",
        }
    }
}
