use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },

    #[error("zero-norm vector for word {word:?}")]
    ZeroVector { word: String },

    #[error("no vectors found in embedding file")]
    EmptyFile,

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("bag {0:?} is empty")]
    EmptyBag(String),

    #[error("corpus is empty")]
    EmptyCorpus,

    #[error("malformed file: {0}")]
    MalformedFile(String),

    #[error("duplicate bag name {0:?}")]
    DuplicateBagName(String),

    #[error("no keyword candidates (no in-vocabulary non-stopword tokens)")]
    NoCandidates,

    #[error("{hypotheses} hypotheses vs {references} references")]
    LengthMismatch {
        hypotheses: usize,
        references: usize,
    },

    #[error("empty input")]
    EmptyInput,

    #[error("document is empty after stopword filtering")]
    EmptyAfterFiltering,

    #[error("document has no in-vocabulary words")]
    OovOnly,

    #[error("record {0} has no log-probabilities")]
    EmptyRecord(usize),

    #[error("split ratios must be non-negative and sum to 1 (got {0:?})")]
    BadRatios([f64; 3]),

    #[error("item {item} has {found} ratings, expected {expected}")]
    UnequalRaterCounts {
        item: usize,
        expected: usize,
        found: usize,
    },

    #[error("expected agreement is 1; kappa is undefined")]
    DegenerateExpectedAgreement,

    #[error("pool has {available} samples, need {required}")]
    InsufficientPool { available: usize, required: usize },

    #[error("series has zero variance; correlation is undefined")]
    ConstantSeries,

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
