use thiserror::Error;

/// Errors raised anywhere in the recovery pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch in {op}: left is {left_rows}x{left_cols}, right is {right_rows}x{right_cols}")]
    DimensionMismatch {
        op: &'static str,
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },
    #[error("invalid shape: {rows}x{cols} needs {expected} entries, got {got}")]
    InvalidShape {
        rows: usize,
        cols: usize,
        expected: usize,
        got: usize,
    },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("sensing matrix must have fewer rows than columns, got {rows}x{cols}")]
    NotUnderdetermined { rows: usize, cols: usize },
    #[error("singular Gram matrix (condition estimate {condition:e})")]
    SingularGram { condition: f64 },
    #[error("numerical divergence at iteration {iteration}")]
    NumericalDivergence { iteration: usize },
    #[error("degenerate support: columns {support:?} are numerically dependent")]
    DegenerateSupport { support: Vec<usize> },
    #[error("column {col} of the sensing matrix is zero")]
    ZeroColumn { col: usize },
    #[error("instance too large for oracle: {detail}")]
    OracleTooLarge { detail: String },
    #[error("instance too large for spark: {cols} columns exceeds the limit of {limit}")]
    SparkTooLarge { cols: usize, limit: usize },
    #[error("undefined relative error: ground truth is zero")]
    UndefinedRelativeError,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("empty aggregation")]
    EmptyAggregation,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable tag for each variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::InvalidShape { .. } => "invalid_shape",
            Error::NonFinite { .. } => "non_finite",
            Error::NotUnderdetermined { .. } => "not_underdetermined",
            Error::SingularGram { .. } => "singular_gram",
            Error::NumericalDivergence { .. } => "numerical_divergence",
            Error::DegenerateSupport { .. } => "degenerate_support",
            Error::ZeroColumn { .. } => "zero_column",
            Error::OracleTooLarge { .. } => "oracle_too_large",
            Error::SparkTooLarge { .. } => "spark_too_large",
            Error::UndefinedRelativeError => "undefined_relative_error",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::EmptyAggregation => "empty_aggregation",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
