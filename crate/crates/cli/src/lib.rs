//! Experiment harness around the `qsd` classifiers: CSV ingestion, synthetic
//! data, seeded splits, copy sweeps and bound/accuracy studies.

pub mod bundle;
pub mod data;
pub mod error;
pub mod experiment;
pub mod output;
pub mod split;
pub mod study;

pub use bundle::ModelBundle;
pub use data::{generate_synthetic, ingest_csv, LabelColumn, SyntheticSpec};
pub use error::{CliError, CliResult};
pub use experiment::{
    run_experiment, ExperimentConfig, ExperimentResult, Format, InputSpec, SplitSpec,
};
pub use split::{stratified_kfold, stratified_split, Fold, MinMaxScaler, Scaling};
pub use study::{bound_accuracy_study, StudyReport};
