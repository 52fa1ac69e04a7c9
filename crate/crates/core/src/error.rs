use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {source}")]
    Json {
        line: usize,
        #[source]
        source: serde_json::Error,
    },

    #[error("line {line}: {message}")]
    Record { line: usize, message: String },

    #[error("invalid reading value `{0}`")]
    InvalidReading(String),

    #[error("invalid sign name `{0}`")]
    InvalidSignName(String),

    #[error("invalid glyph codes: {0}")]
    InvalidGlyphCodes(String),

    #[error("sign `{0}` is defined more than once")]
    DuplicateSign(String),

    #[error("reading `{reading}` is claimed by both `{first}` and `{second}`")]
    ReadingCollision {
        reading: String,
        first: String,
        second: String,
    },

    #[error("sign `{0}` is not in the sign list")]
    UnknownSign(String),

    #[error("{0}")]
    Undefined(&'static str),

    #[error("invalid document: {0}")]
    InvalidDocument(String),

    #[error("no catalogue entry for `{0}`")]
    MissingCatalogueEntry(String),

    #[error("duplicate tablet id `{0}`")]
    DuplicateId(String),

    #[error("invalid split ratios: {0}")]
    InvalidRatios(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("prediction for `{0}` has no reference")]
    UnknownPrediction(String),

    #[error("{path}: {source}")]
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
}
