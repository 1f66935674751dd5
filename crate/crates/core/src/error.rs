use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid argument or malformed input data.
    #[error("invalid input: {0}")]
    Input(String),

    /// The incidence graph or block layout violates a structural requirement.
    #[error("structural error: {0}")]
    Structure(String),

    /// A smooth component has a non-positive Lipschitz constant.
    #[error("component {component} has non-positive Lipschitz constant {value}")]
    NonPositiveLipschitz { component: usize, value: f64 },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Internal consistency failure (for example a drifting residual cache).
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn structure(msg: impl Into<String>) -> Self {
        Error::Structure(msg.into())
    }

    /// Attach a component index to a [`Error::NonPositiveLipschitz`].
    pub fn at_component(self, j: usize) -> Self {
        match self {
            Error::NonPositiveLipschitz { value, .. } => Error::NonPositiveLipschitz {
                component: j,
                value,
            },
            e => e,
        }
    }

    /// Short category name, used by the CLI for exit codes and messages.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Input(_) | Error::NonPositiveLipschitz { .. } => "input",
            Error::Structure(_) => "structure",
            Error::Parse { .. } => "parse",
            Error::Io { .. } => "io",
            Error::Internal(_) => "internal",
        }
    }
}
