//! Bound-versus-accuracy study across several binary experiments.

use qsd::metrics::{linear_fit, pearson, LinearFit};
use qsd::ClassifierKind;
use serde::{Deserialize, Serialize};

use crate::data::SyntheticSpec;
use crate::error::{CliError, CliResult};
use crate::experiment::{run_experiment, ExperimentConfig, Format, InputSpec};

pub const STUDY_SCHEMA: &str = "qsd-study/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub dataset: String,
    pub seed: u64,
    pub copies: usize,
    pub helstrom_bound: f64,
    pub balanced_accuracy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StudyReport {
    pub schema: String,
    pub rows: Vec<StudyRow>,
    /// Pearson coefficient of (bound, balanced accuracy); `None` when either
    /// column is constant.
    pub pearson: Option<f64>,
    /// Least-squares line of accuracy on bound; `None` when undefined.
    pub fit: Option<LinearFit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub configs: Vec<ExperimentConfig>,
}

/// Runs every config (Helstrom, binary) and correlates each record's bound
/// with its balanced accuracy.
pub fn bound_accuracy_study(cfgs: &[ExperimentConfig]) -> CliResult<StudyReport> {
    if cfgs.len() < 3 {
        return Err(CliError::Usage(format!(
            "a study needs at least 3 configs, got {}",
            cfgs.len()
        )));
    }
    let mut rows = Vec::new();
    for cfg in cfgs {
        if cfg.classifier != ClassifierKind::Helstrom {
            return Err(CliError::Usage(
                "study configs must use the helstrom classifier".into(),
            ));
        }
        let mut quiet = cfg.clone();
        quiet.output = None;
        let result = run_experiment(&quiet)?;
        for r in &result.records {
            rows.push(StudyRow {
                dataset: result.dataset.name.clone(),
                seed: cfg.seed,
                copies: r.copies,
                helstrom_bound: r.bound(),
                balanced_accuracy: r.balanced_accuracy,
            });
        }
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.helstrom_bound).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.balanced_accuracy).collect();
    let (pearson, fit, note) = match pearson(&xs, &ys) {
        Ok(p) => (Some(p), Some(linear_fit(&xs, &ys)?), None),
        Err(qsd::Error::UndefinedCorrelation(why)) => (
            None,
            None,
            Some(format!("correlation undefined ({why}); no line fitted")),
        ),
        Err(e) => return Err(e.into()),
    };
    Ok(StudyReport {
        schema: STUDY_SCHEMA.into(),
        rows,
        pearson,
        fit,
        note,
        configs: cfgs.to_vec(),
    })
}

/// `count` binary blob datasets of increasing difficulty: the second
/// center sits at `(δ, ..., δ)` with `δ` drawn per dataset from [0.25, 3],
/// unit spread, seeds `seed, seed + 1, ...`.
pub fn synthetic_study_configs(
    count: usize,
    seed: u64,
    points_per_class: usize,
    copies: usize,
) -> Vec<ExperimentConfig> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..count as u64)
        .map(|i| {
            let delta: f64 = rng.gen_range(0.25..3.0);
            let spec = SyntheticSpec::Blobs {
                centers: vec![vec![0.0, 0.0], vec![delta, delta]],
                points_per_class,
                spread: 1.0,
            };
            let mut cfg =
                ExperimentConfig::new(InputSpec::Synthetic(spec), ClassifierKind::Helstrom);
            cfg.seed = seed.wrapping_add(i);
            cfg.copies_min = copies;
            cfg.copies_max = copies;
            cfg
        })
        .collect()
}

impl StudyReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Header `record,dataset,seed,copies,helstrom_bound,balanced_accuracy,statistic,value`.
    /// `point` rows fill the first six columns; `summary` rows carry one of
    /// `pearson`, `slope`, `intercept`, `r_squared` with an empty value when
    /// undefined.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let header = [
            "record",
            "dataset",
            "seed",
            "copies",
            "helstrom_bound",
            "balanced_accuracy",
            "statistic",
            "value",
        ];
        w.write_record(header).expect("in-memory csv write");
        for r in &self.rows {
            w.write_record([
                "point".to_string(),
                r.dataset.clone(),
                r.seed.to_string(),
                r.copies.to_string(),
                r.helstrom_bound.to_string(),
                r.balanced_accuracy.to_string(),
                String::new(),
                String::new(),
            ])
            .expect("in-memory csv write");
        }
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        let summary = [
            ("pearson", opt(self.pearson)),
            ("slope", opt(self.fit.map(|f| f.slope))),
            ("intercept", opt(self.fit.map(|f| f.intercept))),
            ("r_squared", opt(self.fit.map(|f| f.r_squared))),
        ];
        for (name, value) in summary {
            w.write_record(["summary", "", "", "", "", "", name, value.as_str()])
                .expect("in-memory csv write");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv flush")).expect("utf-8 csv")
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }
}
