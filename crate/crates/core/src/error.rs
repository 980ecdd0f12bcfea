use std::path::PathBuf;

use crate::factorization::TrainTrace;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{file}:{line}: {message}")]
    Parse {
        file: String,
        line: usize,
        message: String,
    },

    #[error("{file}:{line}: {message}")]
    Referential {
        file: String,
        line: usize,
        message: String,
    },

    #[error("{file}: undecodable byte 0x{byte:02x} at offset {offset}")]
    Decode { file: String, offset: usize, byte: u8 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("index {index} out of range for {what} (len {len})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        len: usize,
    },

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("training failed{}: {message}", fold.map(|f| format!(" in fold {f}")).unwrap_or_default())]
    TrainingFailed {
        fold: Option<usize>,
        message: String,
        trace: Box<TrainTrace>,
    },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(file: &str, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            file: file.to_string(),
            line,
            message: message.into(),
        }
    }
}
