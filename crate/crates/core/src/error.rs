use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the enhancement pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("length mismatch: expected {expected} samples, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("sample rate mismatch: {0} Hz vs {1} Hz")]
    RateMismatch(u32, u32),

    #[error("signal contains a non-finite sample at index {0}")]
    NonFinite(usize),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("unsupported wav encoding: {0}")]
    UnsupportedWav(String),

    #[error("expected a mono wav file, found {0} channels")]
    ChannelCount(u16),

    #[error("wav i/o on {path}: {source}")]
    Wav {
        path: PathBuf,
        #[source]
        source: hound::Error,
    },

    #[error("i/o on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("lookup table: {0}")]
    Lookup(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
