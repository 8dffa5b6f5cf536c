use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-positive distance: {what} = {value}")]
    NonPositiveDistance { what: &'static str, value: f64 },

    #[error("sample grid is empty")]
    EmptyGrid,

    #[error("sample grid is not strictly increasing at index {index}")]
    UnsortedGrid { index: usize },

    #[error("profiles do not share the same plane and grid")]
    ProfileMismatch,

    #[error("window must be positive, got {0}")]
    BadWindow(f64),

    #[error("intended signal is zero inside the window")]
    ZeroIntendedSignal,

    #[error("per-eye mode needs exactly 2 views, got {0}")]
    BadViewCount(usize),

    #[error("no masks supplied")]
    EmptyMaskList,

    #[error("mask has {found} columns, expected {expected}")]
    MaskLengthMismatch { expected: usize, found: usize },

    #[error("{0} must lie strictly between 0 and 1")]
    BadFraction(&'static str),

    #[error("rate must be positive, got {0}")]
    BadRate(f64),

    #[error("image dimensions do not match: {0}")]
    DimensionMismatch(String),

    #[error("sample {value} at index {index} is outside [0, 1]")]
    SampleOutOfRange { index: usize, value: f32 },

    #[error("expected {expected} panel frames (one per illuminate phase), got {found}")]
    FrameCountMismatch { expected: usize, found: usize },

    #[error("sweep range is empty")]
    EmptyRange,

    #[error("no viewers supplied")]
    NoViewers,

    #[error("invalid geometry: {field}: {reason}")]
    InvalidGeometry { field: &'static str, reason: String },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("validation error: {field}: {reason}")]
    Validation { field: String, reason: String },

    #[error("malformed image: {0}")]
    Image(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}
