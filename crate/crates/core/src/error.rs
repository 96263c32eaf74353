use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum JacquetError {
    #[error("unknown catalog entry {0:?} (known: sl2r, sl3r, sp4r, sl2c)")]
    UnknownAlgebra(String),

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("search budget exhausted for {what} (bound reached: {bound})")]
    ResourceExhausted { what: String, bound: usize },

    #[error("truncation too small: height {required} required, {available} available ({context})")]
    TruncationTooSmall {
        required: i64,
        available: i64,
        context: String,
    },

    #[error("singular parameter: w{index} fixes lambda ({detail})")]
    SingularParameter { index: usize, detail: String },

    #[error("unsupported parameter: {0}")]
    UnsupportedParameter(String),

    #[error("not invertible by geometric series: {0}")]
    NotInvertible(String),

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("verification failure: {0}")]
    Verification(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl JacquetError {
    /// Stable machine-readable code used in reports.
    pub fn code(&self) -> &'static str {
        match self {
            JacquetError::UnknownAlgebra(_) => "unknown_algebra",
            JacquetError::Consistency(_) => "internal_consistency",
            JacquetError::Dimension { .. } => "dimension",
            JacquetError::ResourceExhausted { .. } => "resource_exhausted",
            JacquetError::TruncationTooSmall { .. } => "truncation_too_small",
            JacquetError::SingularParameter { .. } => "singular_parameter",
            JacquetError::UnsupportedParameter(_) => "unsupported_parameter",
            JacquetError::NotInvertible(_) => "not_invertible",
            JacquetError::Configuration(_) => "configuration",
            JacquetError::Precondition(_) => "precondition",
            JacquetError::Verification(_) => "verification_failure",
            JacquetError::Parse(_) => "parse",
            JacquetError::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for JacquetError {
    fn from(e: std::io::Error) -> Self {
        JacquetError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, JacquetError>;
