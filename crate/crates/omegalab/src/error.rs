use std::io;
use std::path::PathBuf;

use omegalab_core::kraft::KraftError;
use omegalab_core::lab::LabError;
use omegalab_core::scatter::ScatterError;
use omegalab_core::MachineError;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Machine(#[from] MachineError),
    #[error(transparent)]
    Kraft(#[from] KraftError),
    #[error(transparent)]
    Lab(#[from] LabError),
    #[error(transparent)]
    Scatter(#[from] ScatterError),
    #[error("unknown format {0:?} (expected csv, json or text)")]
    UnknownFormat(String),
    #[error("cache {}: {reason}", path.display())]
    BadCache { path: PathBuf, reason: String },
    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
