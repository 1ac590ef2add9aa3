use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the library.
///
/// The variants map onto the CLI's exit-code contract: `Contract` and
/// `Config` are usage problems, `Parse`/`Io`/`MissingInput` are input
/// problems, and `Numerical` is a NaN/Inf abort.
#[derive(Debug, Error)]
pub enum Error {
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("numerical abort at {stage} (step {step}): {msg}")]
    Numerical {
        stage: &'static str,
        step: usize,
        msg: String,
    },

    #[error("class {0} has no samples")]
    EmptyClass(usize),

    #[error("missing input file: {}", .0.display())]
    MissingInput(PathBuf),

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        let path = path.into();
        if source.kind() == std::io::ErrorKind::NotFound {
            Error::MissingInput(path)
        } else {
            Error::Io { path, source }
        }
    }
}
