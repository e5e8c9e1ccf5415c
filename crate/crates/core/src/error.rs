use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{}: file contains no data rows", path.display())]
    EmptyFile { path: PathBuf },

    #[error("{}: row {row} has {found} fields, expected {expected}", path.display())]
    RaggedRow {
        path: PathBuf,
        row: u64,
        expected: usize,
        found: usize,
    },

    #[error("{}: row {row}, column {column}: cannot parse {value:?} as a finite number", path.display())]
    BadCell {
        path: PathBuf,
        row: u64,
        column: usize,
        value: String,
    },

    #[error("{}: label column {column} not found", path.display())]
    MissingLabelColumn { path: PathBuf, column: String },

    #[error("feature value at row {row}, feature {feature} is not finite")]
    NonFinite { row: usize, feature: usize },

    #[error("dimensionality mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("label id {id} is outside the registry of {classes} classes")]
    LabelOutOfRange { id: usize, classes: usize },

    #[error("label registries of the datasets differ")]
    RegistryMismatch,

    #[error("train count {train_count} must be in 1..{n}")]
    SplitOutOfRange { train_count: usize, n: usize },

    #[error("k must be at least 1")]
    InvalidK,

    #[error("r must be at least 1")]
    InvalidR,

    #[error("sigma must be positive and finite, got {0}")]
    InvalidSigma(f64),

    #[error("neighbor list is empty")]
    EmptyNeighbors,

    #[error("malformed neighbor list: {0}")]
    MalformedNeighbors(&'static str),

    #[error("class {class:?} has a single training pattern, so it has no same-class neighbor")]
    SingletonClass { class: String },

    #[error("invalid evaluation setting: {0}")]
    InvalidSetting(String),
}
