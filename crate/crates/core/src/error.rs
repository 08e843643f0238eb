use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum QtrajError {
    /// The guidance field is undefined because the density is below the node floor.
    #[error("guidance field undefined at x = {x} nm, t = {t} ps (density below node floor)")]
    NodeSingularity { x: f64, t: f64 },

    /// A rejection sampler proposed a point where the target exceeds the envelope.
    #[error("rejection envelope violated at {at}: target {target:e} > envelope {envelope:e}")]
    EnvelopeViolation { at: f64, target: f64, envelope: f64 },

    #[error("slice time {t} ps outside [{t0}, {t_final}] ps")]
    SliceOutOfRange { t: f64, t0: f64, t_final: f64 },

    #[error("config key `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl QtrajError {
    pub fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        QtrajError::Config {
            key: key.into(),
            reason: reason.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        QtrajError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = QtrajError> = std::result::Result<T, E>;
