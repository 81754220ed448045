use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: invalid UTF-8 byte sequence")]
    Decode { line: usize },

    #[error("empty word")]
    EmptyWord,

    #[error("word {0:?} contains whitespace")]
    WhitespaceInWord(String),

    #[error("line {line}: token {token:?} contains the continuation marker \"@@\"")]
    ContinuationMarker { line: usize, token: String },

    #[error("line {line}: segmentation left a word open (final unit ends with \"@@\")")]
    OpenWord { line: usize },

    #[error("line {line}: {message}")]
    Format { line: usize, message: String },

    #[error("word frequency table is empty")]
    EmptyTable,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("line count mismatch: {left} vs {right}")]
    LineCountMismatch { left: usize, right: usize },

    #[error("symbol {0:?} cannot be derived from the merge table")]
    Underivable(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    /// 1-based input line the error points at, when there is one.
    pub fn line(&self) -> Option<usize> {
        match self {
            Error::Decode { line }
            | Error::ContinuationMarker { line, .. }
            | Error::OpenWord { line }
            | Error::Format { line, .. } => Some(*line),
            _ => None,
        }
    }

    pub(crate) fn format(line: usize, message: impl Into<String>) -> Self {
        Error::Format {
            line,
            message: message.into(),
        }
    }
}
