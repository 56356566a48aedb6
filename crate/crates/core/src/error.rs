//! Error type shared by every module.
//!
//! Errors fall into three families that the command-line front end maps to
//! distinct exit codes: configuration problems, numerical failures and
//! resource (I/O) failures.

use std::path::PathBuf;

/// Result alias used throughout the crate.
pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Broad classification used for exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Config,
    Numerical,
    Resource,
}

impl ErrorClass {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorClass::Config => 2,
            ErrorClass::Numerical => 3,
            ErrorClass::Resource => 4,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A parameter lies outside the admissible range of a function.
    #[error("domain error: {0}")]
    Domain(String),

    /// Invalid or inconsistent trajectory / trap parameters.
    #[error("geometry error: {0}")]
    Geometry(String),

    /// Scenario configuration is malformed or inconsistent.
    #[error("configuration error: {0}")]
    Config(String),

    /// An iterative method failed to converge.
    #[error("{method} did not converge after {iterations} iterations (residual {residual:.3e}, tolerance {tolerance:.3e})")]
    NonConvergence {
        method: &'static str,
        iterations: usize,
        residual: f64,
        tolerance: f64,
    },

    /// The discretisation is too coarse for the requested accuracy.
    #[error("resolution error: {0}")]
    Resolution(String),

    /// A time stepper lost norm or symmetry beyond its guard.
    #[error("step-size error: {0}")]
    StepSize(String),

    /// Two tracked levels became degenerate where a finite gap is required.
    #[error("singular coupling at t = {time}: gap {gap:.3e}")]
    Singularity { time: f64, gap: f64 },

    /// An integration window does not contain the whole coupling peak.
    #[error("window [{start}, {end}] too narrow: endpoint coupling is {ratio:.3e} of the peak")]
    WindowTooNarrow { start: f64, end: f64, ratio: f64 },

    /// A caller violated an API contract (wrong lengths, bad indices, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    /// Other numerical failure (NaN, overflow, ...).
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialisation error: {0}")]
    Serialization(String),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Domain(_) | Error::Geometry(_) | Error::Config(_) | Error::Contract(_) => {
                ErrorClass::Config
            }
            Error::NonConvergence { .. }
            | Error::Resolution(_)
            | Error::StepSize(_)
            | Error::Singularity { .. }
            | Error::WindowTooNarrow { .. }
            | Error::Numerical(_) => ErrorClass::Numerical,
            Error::Io { .. } | Error::Serialization(_) => ErrorClass::Resource,
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.class().exit_code()
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}
