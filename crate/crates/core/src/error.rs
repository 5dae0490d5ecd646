use std::path::PathBuf;

use thiserror::Error;

use crate::params::ParamError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {}", join_errors(.0))]
    Params(Vec<ParamError>),

    #[error("invalid parameter: {0}")]
    Param(String),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("DICOM metadata error: {0}")]
    Metadata(String),

    #[error("unsupported format: {0}")]
    Format(String),

    #[error("raw-float file: bad magic number")]
    BadMagic,

    #[error("raw-float file: dimensions {width}x{height} overflow")]
    DimensionOverflow { width: u32, height: u32 },

    #[error("raw-float file: truncated payload (expected {expected} bytes, found {found})")]
    Truncated { expected: usize, found: usize },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("PNG encoding failed: {0}")]
    Png(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}

fn join_errors(errs: &[ParamError]) -> String {
    errs.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; ")
}
