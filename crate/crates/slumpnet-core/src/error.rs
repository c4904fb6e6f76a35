//! Error type shared across the crate.

use alloc::string::String;
use core::fmt;

/// Convenience alias used by every fallible function in this crate.
pub type Result<T> = core::result::Result<T, Error>;

/// All failure modes surfaced by the engine.
///
/// Variants carry a human-readable message with the offending values
/// already formatted in, so callers can print them verbatim.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A shape is structurally invalid (zero extent, wrong rank, overflow).
    InvalidShape(String),
    /// Two shapes that must agree (or broadcast) do not.
    ShapeMismatch(String),
    /// A reduction axis is out of range or repeated.
    InvalidAxis(String),
    /// `backward` was called on a non-scalar or untraced tensor.
    InvalidLoss(String),
    /// An operation needed gradient tape state that does not exist.
    NoGraph(String),
    /// A non-finite value (NaN or infinity) surfaced where it must not.
    NumericFailure(String),
    /// A batch or dataset cannot support the requested statistic.
    DegenerateBatch(String),
    /// An unknown or malformed model identifier.
    InvalidModel(String),
    /// A region of interest does not fit the frame geometry.
    InvalidRoi(String),
    /// An input clip is too short for the requested transform.
    TooShort(String),
    /// Windowing produced zero complete windows.
    NoWindow(String),
    /// Dataset split ratios are malformed.
    InvalidRatios(String),
    /// A value supplied to the generator or trainer is out of range.
    InvalidValue(String),
    /// An empty dataset or manifest where at least one record is required.
    Empty(String),
}

impl Error {
    /// Short machine-readable tag, used by the CLI for exit-code mapping
    /// and by tests that assert on the failure class.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidShape(_) => "invalid-shape",
            Error::ShapeMismatch(_) => "shape-mismatch",
            Error::InvalidAxis(_) => "invalid-axis",
            Error::InvalidLoss(_) => "invalid-loss",
            Error::NoGraph(_) => "no-graph",
            Error::NumericFailure(_) => "numeric-failure",
            Error::DegenerateBatch(_) => "degenerate-batch",
            Error::InvalidModel(_) => "invalid-model",
            Error::InvalidRoi(_) => "invalid-roi",
            Error::TooShort(_) => "too-short",
            Error::NoWindow(_) => "no-window",
            Error::InvalidRatios(_) => "invalid-ratios",
            Error::InvalidValue(_) => "invalid-value",
            Error::Empty(_) => "empty",
        }
    }

    fn message(&self) -> &str {
        match self {
            Error::InvalidShape(m)
            | Error::ShapeMismatch(m)
            | Error::InvalidAxis(m)
            | Error::InvalidLoss(m)
            | Error::NoGraph(m)
            | Error::NumericFailure(m)
            | Error::DegenerateBatch(m)
            | Error::InvalidModel(m)
            | Error::InvalidRoi(m)
            | Error::TooShort(m)
            | Error::NoWindow(m)
            | Error::InvalidRatios(m)
            | Error::InvalidValue(m)
            | Error::Empty(m) => m,
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind(), self.message())
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
