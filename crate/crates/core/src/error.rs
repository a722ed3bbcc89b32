use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed CSV at row {row}: {message}")]
    MalformedCsv { row: u64, message: String },

    #[error("column `{0}` not found in CSV header")]
    MissingColumn(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("empty vocabulary")]
    EmptyVocabulary,

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("id {id} out of range for {len} rows")]
    IdOutOfRange { id: usize, len: usize },

    #[error("zero-norm vector")]
    ZeroVector,

    #[error("item {0} is a zero vector")]
    ZeroItem(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },

    #[error("k must be at least 1")]
    ZeroK,

    #[error("bad magic: expected {expected:?}, found {found:?}")]
    BadMagic { expected: [u8; 4], found: Vec<u8> },

    #[error("unsupported {what} format version {found} (supported: {supported})")]
    UnsupportedVersion {
        what: &'static str,
        found: u32,
        supported: u32,
    },

    #[error("truncated {0} file")]
    Truncated(&'static str),

    #[error("invalid {what} file: {message}")]
    Format { what: &'static str, message: String },

    #[error("unresolvable query: no in-vocabulary tokens (dropped: [{}])", dropped.join(", "))]
    UnresolvableQuery { dropped: Vec<String> },

    #[error("provenance mismatch: {0}")]
    Provenance(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(what: &'static str, message: impl Into<String>) -> Self {
        Error::Format {
            what,
            message: message.into(),
        }
    }

    /// True for errors caused by caller input (bad files, flags, queries)
    /// rather than a broken internal contract.
    pub fn is_user_error(&self) -> bool {
        !matches!(self, Error::IdOutOfRange { .. })
    }
}
