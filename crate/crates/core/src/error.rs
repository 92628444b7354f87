use thiserror::Error;

/// Errors raised anywhere in the pipeline.
///
/// Variants are grouped by origin so callers (notably the CLI) can map them
/// onto exit-code categories: data/content problems vs. caller mistakes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error in {path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },

    #[error("header mismatch in {path}: expected column {position} to be {expected:?}, found {found:?}")]
    HeaderMismatch {
        path: String,
        position: usize,
        expected: String,
        found: String,
    },

    #[error("row {row} has {found} fields, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("row {row}, column {column:?}: cannot parse {value:?} as a number")]
    NumericParse {
        row: usize,
        column: String,
        value: String,
    },

    #[error("row {row}, column {column:?}: label {value:?} is not 0 or 1")]
    LabelParse {
        row: usize,
        column: String,
        value: String,
    },

    #[error("unknown column {name:?}")]
    UnknownColumn { name: String },

    #[error("column {name:?} is the label column and cannot be dropped or selected as a feature")]
    LabelColumn { name: String },

    #[error("invalid schema: {reason}")]
    InvalidSchema { reason: String },

    #[error("schema mismatch: {reason}")]
    SchemaMismatch { reason: String },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("invalid parameter {name}: {reason}")]
    InvalidParam { name: String, reason: String },

    #[error("column {name:?} is not covered by the fitted {artifact}")]
    NotFitted { artifact: String, name: String },

    #[error("class {class} has {count} rows, fewer than the {folds} folds requested")]
    TooFewClassRows {
        class: u8,
        count: usize,
        folds: usize,
    },

    #[error("{kind} requires all-numeric features, but column {column:?} is nominal")]
    NonNumericInput { kind: String, column: String },

    #[error("cannot search: dataset has no attributes")]
    NoAttributes,

    #[error("prediction arrays have different lengths: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("model artifact error: {reason}")]
    Artifact { reason: String },

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid_param(name: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParam {
            name: name.to_string(),
            reason: reason.into(),
        }
    }

    /// True for errors caused by malformed or inconsistent data content,
    /// as opposed to caller/configuration mistakes.
    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            Error::Io { .. }
                | Error::Csv { .. }
                | Error::HeaderMismatch { .. }
                | Error::RaggedRow { .. }
                | Error::NumericParse { .. }
                | Error::LabelParse { .. }
                | Error::EmptyDataset
                | Error::SchemaMismatch { .. }
                | Error::TooFewClassRows { .. }
                | Error::Artifact { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
