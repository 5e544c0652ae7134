//! Seeded train/test partitions and feature scaling.

use qsd::{Dataset, FeatureVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Training set plus held-out labelled points. The held-out part may miss
/// whole classes, so it is not a [`Dataset`].
#[derive(Clone, Debug, PartialEq)]
pub struct Fold {
    pub train: Dataset,
    pub test: Vec<FeatureVector>,
}

fn shuffled_members(ds: &Dataset, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    let mut members = vec![Vec::new(); ds.num_classes()];
    for (i, x) in ds.points().iter().enumerate() {
        members[x.label().unwrap() - 1].push(i);
    }
    for m in &mut members {
        m.shuffle(rng);
    }
    members
}

fn subset(ds: &Dataset, idx: &[usize]) -> Vec<FeatureVector> {
    idx.iter().map(|&i| ds.points()[i].clone()).collect()
}

fn rebuild(ds: &Dataset, points: Vec<FeatureVector>) -> CliResult<Dataset> {
    let out = Dataset::new(points, ds.num_classes())?;
    Ok(match ds.class_names() {
        Some(n) => out.with_class_names(n.to_vec())?,
        None => out,
    })
}

/// Per class, `round(k * test_fraction)` shuffled members go to the test
/// side, clamped so every class keeps at least one training point. Both
/// sides keep the original point order.
pub fn stratified_split(ds: &Dataset, test_fraction: f64, seed: u64) -> CliResult<Fold> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(CliError::Usage(format!(
            "test fraction must be in (0, 1), got {test_fraction}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train_idx = Vec::new();
    let mut test_idx = Vec::new();
    for members in shuffled_members(ds, &mut rng) {
        let k = members.len();
        let n_test = ((k as f64 * test_fraction).round() as usize).min(k - 1);
        test_idx.extend_from_slice(&members[..n_test]);
        train_idx.extend_from_slice(&members[n_test..]);
    }
    if test_idx.is_empty() {
        return Err(CliError::Data(
            "test split is empty; classes are too small".into(),
        ));
    }
    train_idx.sort_unstable();
    test_idx.sort_unstable();
    Ok(Fold {
        train: rebuild(ds, subset(ds, &train_idx))?,
        test: subset(ds, &test_idx),
    })
}

/// Stratified k-fold: shuffled class members are dealt round robin over the
/// folds, continuing across classes so fold sizes stay balanced.
pub fn stratified_kfold(ds: &Dataset, folds: usize, seed: u64) -> CliResult<Vec<Fold>> {
    if folds < 2 {
        return Err(CliError::Usage(format!(
            "need at least 2 folds, got {folds}"
        )));
    }
    if folds > ds.len() {
        return Err(CliError::Data(format!(
            "{folds} folds for {} points",
            ds.len()
        )));
    }
    if let Some(k) = ds.class_sizes().iter().position(|&s| s < 2) {
        return Err(CliError::Data(format!(
            "class {} has a single point; k-fold training would lose it",
            k + 1
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = vec![0usize; ds.len()];
    let mut next = 0;
    for members in shuffled_members(ds, &mut rng) {
        for i in members {
            assignment[i] = next % folds;
            next += 1;
        }
    }
    (0..folds)
        .map(|f| {
            let (test, train): (Vec<usize>, Vec<usize>) =
                (0..ds.len()).partition(|&i| assignment[i] == f);
            Ok(Fold {
                train: rebuild(ds, subset(ds, &train))?,
                test: subset(ds, &test),
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Scaling {
    #[default]
    None,
    Minmax,
}

/// Per-feature affine map of the fitted range onto [0, 1]. Constant
/// features map to 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinMaxScaler {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl MinMaxScaler {
    pub fn fit(ds: &Dataset) -> Self {
        let d = ds.feature_dim();
        let mut min = vec![f64::INFINITY; d];
        let mut max = vec![f64::NEG_INFINITY; d];
        for x in ds.points() {
            for (j, v) in x.values().iter().enumerate() {
                min[j] = min[j].min(*v);
                max[j] = max[j].max(*v);
            }
        }
        Self { min, max }
    }

    pub fn transform(&self, x: &FeatureVector) -> CliResult<FeatureVector> {
        if x.dim() != self.min.len() {
            return Err(qsd::Error::DimensionMismatch {
                expected: self.min.len(),
                found: x.dim(),
            }
            .into());
        }
        let values = x
            .values()
            .iter()
            .enumerate()
            .map(|(j, v)| {
                let range = self.max[j] - self.min[j];
                if range > 0.0 {
                    (v - self.min[j]) / range
                } else {
                    0.0
                }
            })
            .collect();
        Ok(match x.label() {
            Some(l) => FeatureVector::labeled(values, l)?,
            None => FeatureVector::new(values)?,
        })
    }

    pub fn transform_dataset(&self, ds: &Dataset) -> CliResult<Dataset> {
        let points = ds
            .points()
            .iter()
            .map(|x| self.transform(x))
            .collect::<CliResult<_>>()?;
        rebuild(ds, points)
    }
}

/// Fits the scaler on the training side only and applies it to both sides.
pub fn scale_fold(fold: Fold, scaling: Scaling) -> CliResult<(Fold, Option<MinMaxScaler>)> {
    match scaling {
        Scaling::None => Ok((fold, None)),
        Scaling::Minmax => {
            let s = MinMaxScaler::fit(&fold.train);
            let train = s.transform_dataset(&fold.train)?;
            let test = fold
                .test
                .iter()
                .map(|x| s.transform(x))
                .collect::<CliResult<_>>()?;
            Ok((Fold { train, test }, Some(s)))
        }
    }
}
