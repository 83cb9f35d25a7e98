use thiserror::Error;

/// Errors produced by the realization library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid mode {letter}: modes are numbered 1..={modes}")]
    InvalidMode { letter: usize, modes: usize },

    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: String,
        expected: usize,
        found: usize,
    },

    #[error("the output map is undefined on the empty word")]
    EmptyWord,

    #[error("word of length {length} exceeds the available Markov depth {depth}")]
    OutOfDepth { length: usize, depth: usize },

    #[error("matrix of {entries} entries exceeds the allocation cap of {cap}; lower the depths or raise the cap")]
    TooLarge { entries: usize, cap: usize },

    #[error("experiment count {count} exceeds the enumeration cap {cap}")]
    CombinatorialCap { count: usize, cap: usize },

    #[error("Hankel data too shallow: shifted columns disagree by {residual:e}")]
    InsufficientDepth { residual: f64 },

    #[error("realization hypothesis violated: Markov residual {residual:e} above tolerance {tolerance:e}")]
    HypothesisViolated { residual: f64, tolerance: f64 },

    #[error("no isomorphism found: residual {residual:e} above tolerance {tolerance:e}")]
    NotIsomorphic { residual: f64, tolerance: f64 },

    #[error("malformed input ({field}): {message}")]
    Format { field: String, message: String },

    #[error("shape error: {0}")]
    Shape(String),
}

impl Error {
    pub(crate) fn dims(what: impl Into<String>, expected: usize, found: usize) -> Self {
        Error::DimensionMismatch {
            what: what.into(),
            expected,
            found,
        }
    }

    pub(crate) fn format(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Format {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
