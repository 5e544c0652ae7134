//! Quantum-inspired supervised classification by quantum state discrimination.
//!
//! Feature vectors are amplitude-encoded as pure density matrices, each class
//! is summarized by its quantum centroid (optionally over `n` tensor copies),
//! and new points are labelled with the Helstrom measurement (two classes) or
//! the pretty good measurement (any number of classes).

pub mod classify;
pub mod discrimination;
pub mod encoding;
pub mod error;
pub mod hermitian;
pub mod metrics;
pub mod model;
pub mod random;

pub use error::{Error, Result};

pub use classify::{train, ClassifierKind, Prediction, TrainedModel};
pub use discrimination::{
    helstrom, helstrom_bound_trace_form, pgm, pgm_bound, success_probability, Ensemble,
    HelstromResult, Measurement,
};
pub use encoding::{
    amplitude_encode, class_centroids, encode_copies, quantum_centroid, Dataset, FeatureVector,
};
pub use hermitian::{DensityMatrix, HermitianMatrix};
pub use metrics::{pearson, MetricsReport};
