use std::io;
use std::path::PathBuf;

/// Errors from file handling and the pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A coding or algebra error.
    #[error(transparent)]
    Core(#[from] msr_core::Error),
    /// An IO error on `path`.
    #[error("{path}: {source}")]
    Io {
        /// File involved.
        path: PathBuf,
        /// Underlying error.
        source: io::Error,
    },
    /// Malformed parameter JSON.
    #[error("parameter file: {0}")]
    Json(#[from] serde_json::Error),
    /// A parameter file that parses but does not describe a valid code.
    #[error("parameter file: {0}")]
    Params(String),
    /// A shard file with a bad header or payload size.
    #[error("{path}: {reason}")]
    Shard {
        /// File involved.
        path: PathBuf,
        /// What is wrong with it.
        reason: String,
    },
    /// Not enough shards on disk.
    #[error("need {needed} shards, found {found}")]
    NotEnoughShards {
        /// Required count.
        needed: usize,
        /// Usable shards found.
        found: usize,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(io::Error) -> Error {
        let path = path.into();
        move |source| Error::Io { path, source }
    }

    /// Whether the error is a bad request rather than a failed computation
    /// or a damaged input.
    pub fn is_usage(&self) -> bool {
        use msr_core::Error as E;
        match self {
            Error::Core(e) => matches!(
                e,
                E::NotPrime(_)
                    | E::ModulusOutOfRange(_)
                    | E::BadParams(_)
                    | E::OutOfRange(_)
                    | E::TooLarge(_)
                    | E::Overflow(_)
            ),
            Error::Params(_) | Error::Json(_) => true,
            _ => false,
        }
    }
}

/// Result alias for this crate.
pub type Result<T> = std::result::Result<T, Error>;
