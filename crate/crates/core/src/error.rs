use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the simulator and its drivers.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid parameters or configuration, detected before any work is done.
    #[error("configuration error: {0}")]
    Config(String),

    /// A caller broke an operation's precondition (wrong representation, length mismatch).
    #[error("contract violation: {0}")]
    Contract(String),

    /// The packet trajectory never reaches the p = 0 anti-crossing.
    #[error("no crossing: arccos argument {argument} lies outside [-1, 1]")]
    NoCrossing { argument: f64 },

    /// The crossing is grazing and the tunneling exponent diverges.
    #[error("degenerate sweep: squared crossing velocity {velocity_sqr:e} is numerically zero")]
    DegenerateSweep { velocity_sqr: f64 },

    /// The coordinate density has (almost) no preferred direction.
    #[error("undefined circular mean: resultant length {resultant:e} below threshold")]
    UndefinedMean { resultant: f64 },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
