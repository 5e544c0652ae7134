//! Copy-count sweeps: split, train, evaluate and record one row per `n`.

use std::path::{Path, PathBuf};
use std::time::Instant;

use qsd::classify::train_capped;
use qsd::encoding::encoded_dim;
use qsd::hermitian::DEFAULT_DIM_CAP;
use qsd::{ClassifierKind, Dataset, MetricsReport};
use serde::{Deserialize, Serialize};

use crate::data::{generate_synthetic, ingest_csv, LabelColumn, SyntheticSpec};
use crate::error::{CliError, CliResult};
use crate::output::write_atomic;
use crate::split::{scale_fold, stratified_kfold, stratified_split, Fold, Scaling};

pub const RESULT_SCHEMA: &str = "qsd-result/1";

/// Allowed drop of the Helstrom bound from one copy count to the next.
pub const MONOTONE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "lowercase")]
pub enum InputSpec {
    Csv {
        path: PathBuf,
        label_column: LabelColumn,
        delimiter: char,
    },
    Synthetic(SyntheticSpec),
}

impl InputSpec {
    pub fn csv(path: impl Into<PathBuf>) -> Self {
        InputSpec::Csv {
            path: path.into(),
            label_column: LabelColumn::Last,
            delimiter: ',',
        }
    }

    pub fn name(&self) -> String {
        match self {
            InputSpec::Csv { path, .. } => path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| path.display().to_string()),
            InputSpec::Synthetic(spec) => spec.name().to_string(),
        }
    }

    /// Synthetic inputs are generated from the experiment seed.
    pub fn load(&self, seed: u64) -> CliResult<Dataset> {
        match self {
            InputSpec::Csv {
                path,
                label_column,
                delimiter,
            } => ingest_csv(path, label_column, delimiter_byte(*delimiter)?),
            InputSpec::Synthetic(spec) => generate_synthetic(spec, seed),
        }
    }
}

pub fn delimiter_byte(c: char) -> CliResult<u8> {
    u8::try_from(c).ok().filter(u8::is_ascii).ok_or_else(|| {
        CliError::Usage(format!(
            "delimiter must be a single ASCII character, got {c:?}"
        ))
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "lowercase")]
pub enum SplitSpec {
    Holdout { test_fraction: f64 },
    Kfold { folds: usize },
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec::Holdout { test_fraction: 0.3 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub input: InputSpec,
    pub classifier: ClassifierKind,
    pub copies_min: usize,
    pub copies_max: usize,
    pub split: SplitSpec,
    pub seed: u64,
    pub scaling: Scaling,
    /// Largest admissible encoded dimension `(d + 1)^n`.
    pub dim_cap: usize,
    /// Write per-`n` wall times into the result file. Off by default so that
    /// repeated runs produce identical bytes.
    pub record_timing: bool,
    pub format: Format,
    /// Not echoed: the same run written to two places gives the same bytes.
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(input: InputSpec, classifier: ClassifierKind) -> Self {
        Self {
            input,
            classifier,
            copies_min: 1,
            copies_max: 1,
            split: SplitSpec::default(),
            seed: 0,
            scaling: Scaling::None,
            dim_cap: DEFAULT_DIM_CAP,
            record_timing: false,
            format: Format::Json,
            output: None,
        }
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.copies_min == 0 || self.copies_min > self.copies_max {
            return Err(CliError::Usage(format!(
                "copy range {}..{} must satisfy 1 <= min <= max",
                self.copies_min, self.copies_max
            )));
        }
        match self.split {
            SplitSpec::Holdout { test_fraction }
                if !(test_fraction > 0.0 && test_fraction < 1.0) =>
            {
                Err(CliError::Usage(format!(
                    "test fraction must be in (0, 1), got {test_fraction}"
                )))
            }
            SplitSpec::Kfold { folds } if folds < 2 => Err(CliError::Usage(format!(
                "need at least 2 folds, got {folds}"
            ))),
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetInfo {
    pub name: String,
    pub m: usize,
    pub d: usize,
    pub classes: usize,
    pub class_names: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CopyRecord {
    pub copies: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub helstrom_bound: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pgm_bound: Option<f64>,
    pub accuracy: f64,
    pub balanced_accuracy: f64,
    pub f1_macro: f64,
    pub cohen_kappa: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

impl CopyRecord {
    pub fn bound(&self) -> f64 {
        self.helstrom_bound.or(self.pgm_bound).unwrap()
    }
}

/// The sweep stopped before `copies_max` because `(d + 1)^at_copies`
/// exceeded the dimension cap.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    pub at_copies: usize,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub schema: String,
    pub dataset: DatasetInfo,
    pub seed: u64,
    pub config: ExperimentConfig,
    pub records: Vec<CopyRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncated: Option<Truncation>,
}

fn folds_for(ds: &Dataset, cfg: &ExperimentConfig) -> CliResult<Vec<Fold>> {
    let raw = match cfg.split {
        SplitSpec::Holdout { test_fraction } => {
            vec![stratified_split(ds, test_fraction, cfg.seed)?]
        }
        SplitSpec::Kfold { folds } => stratified_kfold(ds, folds, cfg.seed)?,
    };
    raw.into_iter()
        .map(|f| scale_fold(f, cfg.scaling).map(|(f, _)| f))
        .collect()
}

/// For k-fold splits the bound is the mean over folds and the metrics come
/// from the predictions of all folds pooled into one confusion matrix.
fn evaluate_copies(
    folds: &[Fold],
    cfg: &ExperimentConfig,
    classes: usize,
    n: usize,
) -> CliResult<CopyRecord> {
    let start = Instant::now();
    let mut bound = 0.0;
    let (mut truth, mut predicted) = (Vec::new(), Vec::new());
    for fold in folds {
        let model = train_capped(&fold.train, cfg.classifier, n, cfg.dim_cap)?;
        bound += model.bound();
        for x in &fold.test {
            truth.push(x.label().unwrap());
            predicted.push(model.predict(x)?.label);
        }
    }
    bound /= folds.len() as f64;
    let report = MetricsReport::from_labels(&truth, &predicted, classes)?;
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    let helstrom = cfg.classifier == ClassifierKind::Helstrom;
    Ok(CopyRecord {
        copies: n,
        helstrom_bound: helstrom.then_some(bound),
        pgm_bound: (!helstrom).then_some(bound),
        accuracy: report.accuracy,
        balanced_accuracy: report.balanced_accuracy,
        f1_macro: report.f1_macro,
        cohen_kappa: report.cohen_kappa,
        wall_time_ms: Some(elapsed),
    })
}

/// Runs the sweep on an already loaded dataset without writing anything.
pub fn sweep_dataset(
    ds: &Dataset,
    name: &str,
    cfg: &ExperimentConfig,
) -> CliResult<ExperimentResult> {
    cfg.validate()?;
    let folds = folds_for(ds, cfg)?;
    let mut records: Vec<CopyRecord> = Vec::new();
    let mut truncated = None;
    for n in cfg.copies_min..=cfg.copies_max {
        if let Err(e @ qsd::Error::Capacity { .. }) = encoded_dim(ds.feature_dim(), n, cfg.dim_cap)
        {
            truncated = Some(Truncation {
                at_copies: n,
                reason: e.to_string(),
            });
            break;
        }
        let rec = evaluate_copies(&folds, cfg, ds.num_classes(), n)?;
        if let (Some(prev), Some(now)) = (
            records.last().and_then(|r| r.helstrom_bound),
            rec.helstrom_bound,
        ) {
            if now < prev - MONOTONE_TOL {
                return Err(CliError::Integrity(format!(
                    "Helstrom bound fell from {prev} at n={} to {now} at n={n} on '{name}' (seed {})",
                    n - 1,
                    cfg.seed
                )));
            }
        }
        records.push(rec);
    }
    Ok(ExperimentResult {
        schema: RESULT_SCHEMA.into(),
        dataset: DatasetInfo {
            name: name.to_string(),
            m: ds.len(),
            d: ds.feature_dim(),
            classes: ds.num_classes(),
            class_names: ds
                .class_names()
                .map(<[String]>::to_vec)
                .unwrap_or_else(|| (1..=ds.num_classes()).map(|k| k.to_string()).collect()),
        },
        seed: cfg.seed,
        config: cfg.clone(),
        records,
        truncated,
    })
}

/// Loads the input, runs the sweep and, if `cfg.output` is set, writes the
/// result atomically in `cfg.format`.
pub fn run_experiment(cfg: &ExperimentConfig) -> CliResult<ExperimentResult> {
    cfg.validate()?;
    let ds = cfg.input.load(cfg.seed)?;
    let result = sweep_dataset(&ds, &cfg.input.name(), cfg)?;
    if let Some(path) = &cfg.output {
        write_result(&result, path, cfg.format)?;
    }
    Ok(result)
}

impl ExperimentResult {
    /// The result as written to disk: wall times only when the config asks.
    pub fn for_output(&self) -> ExperimentResult {
        let mut out = self.clone();
        if !self.config.record_timing {
            for r in &mut out.records {
                r.wall_time_ms = None;
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.for_output()).expect("result serializes");
        s.push('\n');
        s
    }

    /// One row per `(copies, metric)` under the header
    /// `schema,dataset,classifier,seed,copies,metric,value`. The first row
    /// has metric `config` and the compact JSON config as value; a sweep cut
    /// short by the dimension cap ends with a `truncated` row.
    pub fn to_csv(&self) -> String {
        let out = self.for_output();
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "schema",
            "dataset",
            "classifier",
            "seed",
            "copies",
            "metric",
            "value",
        ])
        .expect("in-memory csv write");
        let classifier = out.config.classifier.as_str();
        let seed = out.seed.to_string();
        let mut row = |copies: String, metric: &str, value: String| {
            w.write_record([
                out.schema.as_str(),
                out.dataset.name.as_str(),
                classifier,
                seed.as_str(),
                copies.as_str(),
                metric,
                value.as_str(),
            ])
            .expect("in-memory csv write");
        };
        row(
            String::new(),
            "config",
            serde_json::to_string(&out.config).expect("config serializes"),
        );
        for r in &out.records {
            let n = r.copies.to_string();
            let bound_name = if r.helstrom_bound.is_some() {
                "helstrom_bound"
            } else {
                "pgm_bound"
            };
            row(n.clone(), bound_name, r.bound().to_string());
            row(n.clone(), "accuracy", r.accuracy.to_string());
            row(
                n.clone(),
                "balanced_accuracy",
                r.balanced_accuracy.to_string(),
            );
            row(n.clone(), "f1_macro", r.f1_macro.to_string());
            row(n.clone(), "cohen_kappa", r.cohen_kappa.to_string());
            if let Some(t) = r.wall_time_ms {
                row(n.clone(), "wall_time_ms", t.to_string());
            }
        }
        if let Some(t) = &out.truncated {
            row(t.at_copies.to_string(), "truncated", t.reason.clone());
        }
        let bytes = w.into_inner().expect("in-memory csv flush");
        String::from_utf8(bytes).expect("utf-8 csv")
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }
}

pub fn write_result(result: &ExperimentResult, path: &Path, format: Format) -> CliResult<()> {
    write_atomic(path, result.render(format).as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blobs_cfg(kind: ClassifierKind, classes: usize) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::new(
            InputSpec::Synthetic(SyntheticSpec::default_blobs(classes, 2, 20, 1.0)),
            kind,
        );
        cfg.copies_max = 3;
        cfg.seed = 7;
        cfg
    }

    #[test]
    fn helstrom_sweep_is_monotone() {
        let r = run_experiment(&blobs_cfg(ClassifierKind::Helstrom, 2)).unwrap();
        assert_eq!(r.records.len(), 3);
        let b: Vec<f64> = r
            .records
            .iter()
            .map(|r| r.helstrom_bound.unwrap())
            .collect();
        assert!(b.windows(2).all(|w| w[1] >= w[0] - MONOTONE_TOL), "{b:?}");
        assert!(r.records.iter().all(|r| r.pgm_bound.is_none()));
    }

    #[test]
    fn pgm_on_three_classes_reports_pgm_bound() {
        let mut cfg = blobs_cfg(ClassifierKind::Pgm, 3);
        cfg.copies_max = 2;
        let r = run_experiment(&cfg).unwrap();
        assert_eq!(r.records.len(), 2);
        assert!(r
            .records
            .iter()
            .all(|r| r.pgm_bound.is_some() && r.helstrom_bound.is_none()));
        assert_eq!(r.dataset.classes, 3);
    }

    #[test]
    fn capacity_truncates_the_sweep() {
        let mut cfg = blobs_cfg(ClassifierKind::Helstrom, 2);
        cfg.copies_max = 5;
        cfg.dim_cap = 27;
        let r = run_experiment(&cfg).unwrap();
        assert_eq!(r.records.len(), 3);
        assert_eq!(r.truncated.as_ref().unwrap().at_copies, 4);
        assert!(r.to_csv().lines().last().unwrap().contains(",4,truncated,"));
    }

    #[test]
    fn timing_is_left_out_unless_requested() {
        let mut cfg = blobs_cfg(ClassifierKind::Helstrom, 2);
        cfg.copies_max = 1;
        let r = run_experiment(&cfg).unwrap();
        assert!(r.records[0].wall_time_ms.is_some());
        assert!(!r.to_json().contains("wall_time_ms"));
        cfg.record_timing = true;
        assert!(run_experiment(&cfg)
            .unwrap()
            .to_json()
            .contains("wall_time_ms"));
    }

    #[test]
    fn json_round_trips_and_echoes_config() {
        let mut cfg = blobs_cfg(ClassifierKind::Pgm, 2);
        cfg.split = SplitSpec::Kfold { folds: 4 };
        cfg.scaling = Scaling::Minmax;
        let r = run_experiment(&cfg).unwrap();
        let back: ExperimentResult = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r.for_output());
        assert_eq!(back.config, cfg);
    }

    #[test]
    fn csv_layout() {
        let r = run_experiment(&blobs_cfg(ClassifierKind::Helstrom, 2)).unwrap();
        let csv = r.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(
            lines[0],
            "schema,dataset,classifier,seed,copies,metric,value"
        );
        assert!(lines[1].starts_with("qsd-result/1,blobs,helstrom,7,,config,"));
        assert!(lines[2].starts_with("qsd-result/1,blobs,helstrom,7,1,helstrom_bound,"));
        assert_eq!(lines.len(), 2 + 3 * 5);
    }

    #[test]
    fn bad_configs_are_usage_errors() {
        let mut cfg = blobs_cfg(ClassifierKind::Helstrom, 2);
        cfg.copies_min = 4;
        assert_eq!(run_experiment(&cfg).unwrap_err().exit_code(), 1);
        let mut cfg = blobs_cfg(ClassifierKind::Helstrom, 2);
        cfg.split = SplitSpec::Holdout { test_fraction: 0.0 };
        assert_eq!(run_experiment(&cfg).unwrap_err().exit_code(), 1);
    }
}
