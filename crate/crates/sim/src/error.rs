use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] omnicorr::Error),
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
}

impl SimError {
    pub fn config(msg: impl Into<String>) -> Self {
        Self::Config(msg.into())
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

macro_rules! from_core {
    ($($t:ident),*) => {$(
        impl From<omnicorr::$t> for SimError {
            fn from(e: omnicorr::$t) -> Self {
                Self::Core(e.into())
            }
        }
    )*};
}

from_core!(SpectralError, ModelError, OmnibusError, TheoryError, InferenceError);
