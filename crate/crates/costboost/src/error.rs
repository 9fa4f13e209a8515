//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("file not found: {0}")]
    FileNotFound(String),

    #[error("malformed header: {0}")]
    MalformedHeader(String),

    #[error("cell value {value} out of range 1..=5 at row {row}, column {column}")]
    ValueOutOfRange {
        value: i64,
        row: usize,
        column: String,
    },

    #[error("target column {0:?} not found")]
    MissingTargetColumn(String),

    #[error("dataset is empty{}", if .0.is_empty() { String::new() } else { format!(": {}", .0) })]
    EmptyDataset(String),

    #[error("no feature columns besides the target")]
    NoFeatureColumns,

    #[error("class {class:?} has {count} rows, fewer than k = {k}")]
    TooFewSamples {
        class: String,
        count: usize,
        k: usize,
    },

    #[error("favor_fraction must lie strictly between 0 and 1, got {0}")]
    InvalidFraction(f64),

    #[error("binarization threshold must lie in 2..=5, got {0}")]
    InvalidThreshold(i64),

    #[error("training data is empty")]
    EmptyData,

    #[error("observation weights sum to zero")]
    AllWeightsZero,

    #[error("invalid observation weights: {0}")]
    InvalidWeights(String),

    #[error("expected {expected} features, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("in-bag masks cover {mask_rows} rows but the dataset has {data_rows}")]
    MaskMismatch { mask_rows: usize, data_rows: usize },

    #[error("sequence lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("training data contains a single class only")]
    SingleClassData,

    #[error("ensemble holds no learners")]
    EmptyEnsemble,

    #[error("invalid cost matrix: {0}")]
    InvalidCostMatrix(String),

    #[error("empty input")]
    EmptyInput,

    #[error("confusion matrix has no observations")]
    EmptyMatrix,

    #[error("input schema does not match model features; missing: [{missing}], extra: [{extra}]")]
    SchemaMismatch { missing: String, extra: String },

    #[error("unsupported model file version {found:?}, expected {expected:?}")]
    VersionMismatch { found: String, expected: String },

    #[error("malformed model file: {0}")]
    MalformedModel(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv parse error: {0}")]
    Csv(#[from] csv::Error),
}
