use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("levels {i} and {j} are parallel (slope {slope}); they never cross")]
    DegenerateGeometry { i: usize, j: usize, slope: f64 },

    #[error("no avoided crossing declared between levels {i} and {j}")]
    UnknownCrossing { i: usize, j: usize },

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("degenerate rate system: {0}")]
    DegenerateSystem(String),

    #[error("step size {dt} ns exceeds stability limit {limit} ns")]
    StepSize { dt: f64, limit: f64 },

    #[error("no convergence after {steps} steps (residual {residual:e})")]
    Convergence { steps: u64, residual: f64 },

    #[error("config line {line}: key `{key}`: {msg}")]
    Config {
        line: usize,
        key: String,
        msg: String,
    },

    #[error("malformed grid file: {0}")]
    GridFormat(String),

    #[error("i/o error on {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn config(line: usize, key: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config {
            line,
            key: key.into(),
            msg: msg.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by user input (bad config or parameters) rather
    /// than by the computation or the filesystem.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::Config { .. } | Error::InvalidParameter { .. } | Error::UnknownCrossing { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
