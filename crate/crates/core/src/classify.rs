//! Trainable classifiers on top of the discrimination core.
//!
//! Training encodes every class into its `n`-copy quantum centroid and builds
//! one measurement over the centroids: the Helstrom measurement for two
//! classes, the pretty good measurement for any number of classes. Prediction
//! encodes the new point the same way and picks the class with the largest
//! score, ties going to the smallest class index.

use serde::{Deserialize, Serialize};

use crate::discrimination::{helstrom, pgm_components, Ensemble, Measurement};
use crate::encoding::{class_centroids_capped, copies_amplitudes, Dataset, FeatureVector};
use crate::error::{Error, Result};
use crate::hermitian::{check_same_dim, DensityMatrix, DEFAULT_DIM_CAP};
use crate::metrics::MetricsReport;

/// Tolerance on the sum of stored priors.
pub const PRIOR_SUM_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassifierKind {
    Helstrom,
    Pgm,
}

impl ClassifierKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ClassifierKind::Helstrom => "helstrom",
            ClassifierKind::Pgm => "pgm",
        }
    }
}

impl std::fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ClassifierKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "helstrom" => Ok(ClassifierKind::Helstrom),
            "pgm" => Ok(ClassifierKind::Pgm),
            other => Err(format!(
                "unknown classifier '{other}' (expected helstrom or pgm)"
            )),
        }
    }
}

/// A trained, immutable classifier.
#[derive(Clone, Debug)]
pub struct TrainedModel {
    kind: ClassifierKind,
    copies: usize,
    feature_dim: usize,
    priors: Vec<f64>,
    centroids: Vec<DensityMatrix>,
    measurement: Measurement,
    bound: f64,
    full_rank_sigma: Option<bool>,
}

/// Predicted label (1-based) and the per-class scores it was chosen from.
#[derive(Clone, Debug, PartialEq)]
pub struct Prediction {
    pub label: usize,
    /// `tr(P±ρ)` for Helstrom models, `p_i tr(F_i ρ)` for PGM models.
    pub scores: Vec<f64>,
    /// Outcome probabilities `tr(M_i ρ)` of the measurement, without priors.
    pub probabilities: Vec<f64>,
}

/// Smallest index attaining the maximum, 1-based.
pub fn argmax_min_index(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    best + 1
}

pub fn train(ds: &Dataset, kind: ClassifierKind, copies: usize) -> Result<TrainedModel> {
    train_capped(ds, kind, copies, DEFAULT_DIM_CAP)
}

/// Trains with an explicit cap on the encoded dimension `(d + 1)^n`.
pub fn train_capped(
    ds: &Dataset,
    kind: ClassifierKind,
    copies: usize,
    cap: usize,
) -> Result<TrainedModel> {
    if kind == ClassifierKind::Helstrom && ds.num_classes() != 2 {
        return Err(Error::ClassCount {
            kind: "helstrom",
            expected: 2,
            found: ds.num_classes(),
        });
    }
    let ensemble = Ensemble::new(class_centroids_capped(ds, copies, cap)?)?;
    let priors = ensemble.priors();
    let (measurement, bound, full_rank_sigma) = match kind {
        ClassifierKind::Helstrom => {
            let [(p1, r1), (p2, r2)] = ensemble.entries() else {
                unreachable!("two classes checked above");
            };
            let h = helstrom(r1, r2, *p1, *p2)?;
            let bound = h.bound();
            (h.into_measurement(), bound, None)
        }
        ClassifierKind::Pgm => {
            let c = pgm_components(&ensemble)?;
            let full = c.full_rank_sigma();
            let m = c.into_measurement();
            let bound = crate::discrimination::success_probability(&ensemble, &m)?;
            (m, bound, Some(full))
        }
    };
    let centroids = ensemble.entries().iter().map(|(_, r)| r.clone()).collect();
    Ok(TrainedModel {
        kind,
        copies,
        feature_dim: ds.feature_dim(),
        priors,
        centroids,
        measurement,
        bound,
        full_rank_sigma,
    })
}

impl TrainedModel {
    /// Reassembles a model from stored parts, checking every model invariant.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        kind: ClassifierKind,
        copies: usize,
        feature_dim: usize,
        priors: Vec<f64>,
        centroids: Vec<DensityMatrix>,
        measurement: Measurement,
        bound: f64,
        full_rank_sigma: Option<bool>,
    ) -> Result<Self> {
        let classes = priors.len();
        if kind == ClassifierKind::Helstrom && classes != 2 {
            return Err(Error::ClassCount {
                kind: "helstrom",
                expected: 2,
                found: classes,
            });
        }
        if centroids.len() != classes || measurement.len() != classes {
            return Err(Error::ArityMismatch {
                effects: measurement.len(),
                entries: classes,
            });
        }
        let sum: f64 = priors.iter().sum();
        if (sum - 1.0).abs() > PRIOR_SUM_TOL {
            return Err(Error::InvalidPriors(format!("priors sum to {sum}")));
        }
        let dim = crate::encoding::encoded_dim(feature_dim, copies, usize::MAX)?;
        check_same_dim(dim, measurement.dim())?;
        for c in &centroids {
            check_same_dim(dim, c.dim())?;
        }
        Ok(Self {
            kind,
            copies,
            feature_dim,
            priors,
            centroids,
            measurement,
            bound,
            full_rank_sigma,
        })
    }

    pub fn kind(&self) -> ClassifierKind {
        self.kind
    }

    pub fn copies(&self) -> usize {
        self.copies
    }

    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    pub fn num_classes(&self) -> usize {
        self.priors.len()
    }

    pub fn encoded_dim(&self) -> usize {
        self.measurement.dim()
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    pub fn centroids(&self) -> &[DensityMatrix] {
        &self.centroids
    }

    pub fn measurement(&self) -> &Measurement {
        &self.measurement
    }

    /// Helstrom bound for Helstrom models, PGM bound for PGM models.
    pub fn bound(&self) -> f64 {
        self.bound
    }

    /// For PGM models, whether the average centroid state was full rank.
    pub fn full_rank_sigma(&self) -> Option<bool> {
        self.full_rank_sigma
    }

    pub fn ensemble(&self) -> Result<Ensemble> {
        Ensemble::new(
            self.priors
                .iter()
                .copied()
                .zip(self.centroids.iter().cloned())
                .collect(),
        )
    }

    pub fn predict(&self, x: &FeatureVector) -> Result<Prediction> {
        check_same_dim(self.feature_dim, x.dim())?;
        let amplitudes = copies_amplitudes(x, self.copies, self.encoded_dim())?;
        let probabilities: Vec<f64> = self
            .measurement
            .effects()
            .iter()
            .map(|e| e.quadratic_form(&amplitudes))
            .collect();
        Ok(self.decide(probabilities))
    }

    /// Classifies an already encoded state of dimension `(d + 1)^n`.
    pub fn predict_state(&self, rho: &DensityMatrix) -> Result<Prediction> {
        Ok(self.decide(self.measurement.probabilities(rho)?))
    }

    fn decide(&self, probabilities: Vec<f64>) -> Prediction {
        let scores = match self.kind {
            ClassifierKind::Helstrom => probabilities.clone(),
            ClassifierKind::Pgm => probabilities
                .iter()
                .zip(&self.priors)
                .map(|(q, p)| p * q)
                .collect(),
        };
        Prediction {
            label: argmax_min_index(&scores),
            scores,
            probabilities,
        }
    }

    pub fn evaluate(&self, test: &Dataset) -> Result<MetricsReport> {
        if test.num_classes() != self.num_classes() {
            return Err(Error::ClassCount {
                kind: self.kind.as_str(),
                expected: self.num_classes(),
                found: test.num_classes(),
            });
        }
        let predicted = test
            .points()
            .iter()
            .map(|x| self.predict(x).map(|p| p.label))
            .collect::<Result<Vec<_>>>()?;
        MetricsReport::from_labels(&test.labels(), &predicted, self.num_classes())
    }
}

pub fn predict(model: &TrainedModel, x: &FeatureVector) -> Result<Prediction> {
    model.predict(x)
}

pub fn evaluate(model: &TrainedModel, test: &Dataset) -> Result<MetricsReport> {
    model.evaluate(test)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrimination::helstrom as helstrom_fn;
    use crate::encoding::amplitude_encode;
    use crate::hermitian::HermitianMatrix;

    fn lab(v: &[f64], l: usize) -> FeatureVector {
        FeatureVector::labeled(v.to_vec(), l).unwrap()
    }

    fn two_points() -> Dataset {
        Dataset::new(vec![lab(&[0.0], 1), lab(&[1.0], 2)], 2).unwrap()
    }

    #[test]
    fn helstrom_model_bound_matches_direct_composition() {
        let m = train(&two_points(), ClassifierKind::Helstrom, 1).unwrap();
        let direct = helstrom_fn(
            &amplitude_encode(&lab(&[0.0], 1)),
            &amplitude_encode(&lab(&[1.0], 2)),
            0.5,
            0.5,
        )
        .unwrap()
        .bound();
        assert!((m.bound() - direct).abs() < 1e-15);
        // two pure states with overlap 1/2: (1 + sqrt(1 - 1/2)) / 2
        assert!((m.bound() - 0.5 * (1.0 + 0.5f64.sqrt())).abs() < 1e-12);
        assert_eq!(m.full_rank_sigma(), None);
    }

    #[test]
    fn pgm_model_is_complete() {
        let m = train(&two_points(), ClassifierKind::Pgm, 1).unwrap();
        assert!(m.measurement().completeness_error() < 1e-9);
        assert_eq!(m.full_rank_sigma(), Some(true));
    }

    #[test]
    fn helstrom_needs_two_classes() {
        let ds = Dataset::new(vec![lab(&[0.0], 1), lab(&[1.0], 2), lab(&[2.0], 3)], 3).unwrap();
        assert!(matches!(
            train(&ds, ClassifierKind::Helstrom, 1),
            Err(Error::ClassCount {
                expected: 2,
                found: 3,
                ..
            })
        ));
        assert!(train(&ds, ClassifierKind::Pgm, 1).is_ok());
    }

    #[test]
    fn orthogonal_training_points_predict_themselves() {
        // encodings of x and y are orthogonal when x·y + 1 = 0
        let ds = Dataset::new(vec![lab(&[1.0, 0.0], 1), lab(&[-1.0, 0.0], 2)], 2).unwrap();
        for kind in [ClassifierKind::Helstrom, ClassifierKind::Pgm] {
            let m = train(&ds, kind, 1).unwrap();
            let p = m.predict(&lab(&[1.0, 0.0], 1)).unwrap();
            assert_eq!(p.label, 1);
            assert!((p.probabilities[0] - 1.0).abs() < 1e-12);
            let q = m.predict(&lab(&[-1.0, 0.0], 2)).unwrap();
            assert_eq!(q.label, 2);
        }
    }

    #[test]
    fn exact_tie_goes_to_class_one() {
        let measurement = Measurement::new(vec![
            HermitianMatrix::from_real_diagonal(&[1.0, 0.0]),
            HermitianMatrix::from_real_diagonal(&[0.0, 1.0]),
        ])
        .unwrap();
        let centroids = vec![
            DensityMatrix::from_diagonal(&[1.0, 0.0]).unwrap(),
            DensityMatrix::from_diagonal(&[0.0, 1.0]).unwrap(),
        ];
        let m = TrainedModel::from_parts(
            ClassifierKind::Helstrom,
            1,
            1,
            vec![0.5, 0.5],
            centroids,
            measurement,
            1.0,
            None,
        )
        .unwrap();
        // [1] encodes to the all-1/2 matrix: both scores are exactly 1/2
        let p = m.predict(&lab(&[1.0], 1)).unwrap();
        assert_eq!(p.scores[0], p.scores[1]);
        assert_eq!(p.label, 1);
        assert_eq!(argmax_min_index(&[0.2, 0.7, 0.7]), 2);
        assert_eq!(argmax_min_index(&[0.3]), 1);
    }

    #[test]
    fn predict_checks_dimension() {
        let m = train(&two_points(), ClassifierKind::Pgm, 2).unwrap();
        assert!(matches!(
            m.predict(&lab(&[0.0, 1.0], 1)),
            Err(Error::DimensionMismatch {
                expected: 1,
                found: 2
            })
        ));
    }

    #[test]
    fn helstrom_scores_sum_to_one() {
        let ds = Dataset::new(
            vec![
                lab(&[0.3, 1.0], 1),
                lab(&[0.1, 0.8], 1),
                lab(&[-2.0, 0.4], 2),
            ],
            2,
        )
        .unwrap();
        let m = train(&ds, ClassifierKind::Helstrom, 2).unwrap();
        for x in [[0.0, 0.0], [1.5, -3.0], [-2.0, 0.4]] {
            let p = m.predict(&FeatureVector::new(x.to_vec()).unwrap()).unwrap();
            assert!((p.scores.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn evaluate_requires_matching_classes() {
        let m = train(&two_points(), ClassifierKind::Pgm, 1).unwrap();
        let three = Dataset::new(vec![lab(&[0.0], 1), lab(&[1.0], 2), lab(&[2.0], 3)], 3).unwrap();
        assert!(matches!(m.evaluate(&three), Err(Error::ClassCount { .. })));
        let r = m.evaluate(&two_points()).unwrap();
        assert_eq!(
            r.confusion
                .iter()
                .map(|row| row.iter().sum::<usize>())
                .collect::<Vec<_>>(),
            vec![1, 1]
        );
    }

    #[test]
    fn kind_parses() {
        assert_eq!(
            "pgm".parse::<ClassifierKind>().unwrap(),
            ClassifierKind::Pgm
        );
        assert!("svm".parse::<ClassifierKind>().is_err());
    }
}
