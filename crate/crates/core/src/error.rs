use thiserror::Error;

/// Errors raised by the discrimination toolkit and the classifiers built on it.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (max asymmetry {max_asymmetry:.3e})")]
    NotHermitian { max_asymmetry: f64 },

    #[error("matrix has a non-finite entry at ({row}, {col})")]
    NonFiniteEntry { row: usize, col: usize },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("density matrix trace is {trace}, expected 1")]
    InvalidTrace { trace: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("shape error: {0}")]
    Shape(String),

    #[error("required dimension {required} exceeds capacity {cap}")]
    Capacity { required: String, cap: usize },

    #[error("feature {index} is not finite ({value})")]
    NonFiniteFeature { index: usize, value: f64 },

    #[error("feature vector is empty")]
    EmptyFeatureVector,

    #[error("class {class} has no members")]
    DegenerateClass { class: usize },

    #[error("label {label} outside 1..={num_classes}")]
    InvalidLabel { label: usize, num_classes: usize },

    #[error("point {index} has no label")]
    MissingLabel { index: usize },

    #[error("need at least 2 classes, found {found}")]
    TooFewClasses { found: usize },

    #[error("invalid priors: {0}")]
    InvalidPriors(String),

    #[error("measurement has {effects} effects but the ensemble has {entries} states")]
    ArityMismatch { effects: usize, entries: usize },

    #[error("invalid measurement: {0}")]
    InvalidMeasurement(String),

    #[error("the {kind} classifier needs {expected} classes, dataset has {found}")]
    ClassCount {
        kind: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("copy count must be at least 1")]
    ZeroCopies,

    #[error("empty dataset")]
    EmptyDataset,

    #[error("correlation undefined: {0}")]
    UndefinedCorrelation(String),

    #[error("model format error: {0}")]
    Model(String),
}

pub type Result<T> = std::result::Result<T, Error>;
