use std::path::PathBuf;

/// Errors reported by this crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An image, signal, or histogram with no samples was passed to an
    /// operation that needs at least one.
    #[error("input contains no samples")]
    Empty,

    /// An intensity fell outside the open interval (0, 1).
    #[error("intensity {value} at index {index} is outside (0, 1)")]
    IntensityOutOfRange { index: usize, value: f64 },

    /// A gamma exponent was zero, negative, or not finite.
    #[error("gamma must be positive and finite, got {0}")]
    InvalidGamma(f64),

    /// Two buffers that must describe the same pixel grid disagree.
    #[error("dimension mismatch: {left_width}x{left_height} vs {right_width}x{right_height}")]
    DimensionMismatch {
        left_width: u32,
        left_height: u32,
        right_width: u32,
        right_height: u32,
    },

    /// Buffer length does not match width * height (* channels).
    #[error("buffer holds {actual} samples, dimensions require {expected}")]
    BufferSize { expected: usize, actual: usize },

    /// A mask selects no pixels.
    #[error("mask selects no pixels")]
    EmptyMask,

    /// The visual 2.2 compensation was requested twice.
    #[error("estimate is already the visual variant")]
    AlreadyVisual,

    /// A color conversion input fell outside its documented range.
    #[error("HSV component {name}={value} is outside {range}")]
    HsvOutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    /// A PGM/PPM stream does not conform to the binary netpbm grammar.
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    /// Underlying file I/O failure.
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

    pub(crate) fn parse(offset: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            offset,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
