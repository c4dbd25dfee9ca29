//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("no records provided")]
    NoRecords,
    #[error("record `{example_id}`: {reason}")]
    InvalidPrediction { example_id: String, reason: String },
    #[error("{what} must be in [{min}, {max}], got {value}")]
    OutOfRange {
        what: String,
        value: f64,
        min: f64,
        max: f64,
    },
    #[error("invalid {what} `{value}`: expected one of {expected}")]
    InvalidValue {
        what: &'static str,
        value: String,
        expected: &'static str,
    },

    #[error("accuracy undefined: confusion matrix holds no records")]
    EmptyConfusion,
    #[error("sensitivity undefined: no diseased records (tp + fn = 0)")]
    UndefinedSensitivity,
    #[error("specificity undefined: no healthy records (tn + fp = 0)")]
    UndefinedSpecificity,

    #[error("value at index {index} is not finite")]
    NonFiniteValue { index: usize },
    #[error("rank {rank} outside [1, {n}]")]
    RankOutOfRange { rank: f64, n: usize },
    #[error("model name must be non-empty")]
    EmptyModelName,
    #[error("duplicate model name `{name}`")]
    DuplicateModel { name: String },
    #[error(
        "models {names:?} tie at overall score {total} and at least one has no parameter count"
    )]
    UnbrokenScoreTie { total: f64, names: Vec<String> },
    #[error("weights must be non-negative and finite, got {value} for {what}")]
    InvalidWeight { what: &'static str, value: f64 },

    #[error("orientation/zoom variant count b must be at least 1")]
    ZeroOrientationCount,
    #[error("image count must be at least 1 for source `{name}`")]
    EmptySource { name: String },
    #[error("count arithmetic overflow while computing {what}")]
    CountOverflow { what: String },
    #[error("split fractions must be non-negative and sum to 1, got ({train}, {val}, {test})")]
    InvalidSplitSpec { train: f64, val: f64, test: f64 },
    #[error("split total must be at least 1")]
    EmptySplitTotal,
    #[error("split of {total} leaves a negative test count")]
    NegativeSplit { total: u64 },

    #[error("image dimensions must be positive, got {width}x{height}")]
    EmptyImage { width: u32, height: u32 },
    #[error("expected {expected} channels, got {actual}")]
    UnsupportedChannels { expected: &'static str, actual: u8 },
    #[error(
        "pixel buffer holds {actual} bytes, expected {expected} for {width}x{height}x{channels}"
    )]
    PixelBufferMismatch {
        width: u32,
        height: u32,
        channels: u8,
        expected: usize,
        actual: usize,
    },
    #[error("zoom must be positive and finite, got {zoom}")]
    NonPositiveZoom { zoom: f64 },
    #[error("expected {expected} orientation specs (one per b variant), got {actual}")]
    OrientationSpecCount { expected: u64, actual: usize },

    #[error("model `{name}` is not a candidate of {stage}")]
    UnknownCandidate { name: String, stage: String },
    #[error("{stage} expects {expected} run records (one per candidate), got {actual}")]
    CandidateCountMismatch {
        stage: String,
        expected: usize,
        actual: usize,
    },
    #[error("tolerance must be positive, got {tolerance}")]
    NonPositiveTolerance { tolerance: f64 },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: header mismatch: expected `{expected}`, found `{found}`")]
    HeaderMismatch {
        path: String,
        expected: String,
        found: String,
    },
    #[error("{path} line {line}: {reason}")]
    Parse {
        path: String,
        line: u64,
        reason: String,
    },
    #[error("{path}: {reason}")]
    Format { path: String, reason: String },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Attach a path to a raw I/O error.
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
