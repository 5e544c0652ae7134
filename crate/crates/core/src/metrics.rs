//! Classification scores and the correlation statistics used by bound studies.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Confusion matrix (rows: true class, columns: predicted class) and the
/// scores derived from it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub confusion: Vec<Vec<usize>>,
    pub accuracy: f64,
    /// Mean recall over the classes present in the ground truth.
    pub balanced_accuracy: f64,
    /// Unweighted mean of per-class F1; a class absent from both truth and
    /// predictions scores 0.
    pub f1_macro: f64,
    pub cohen_kappa: f64,
}

impl MetricsReport {
    /// Labels are 1-based.
    pub fn from_labels(truth: &[usize], predicted: &[usize], num_classes: usize) -> Result<Self> {
        if truth.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if truth.len() != predicted.len() {
            return Err(Error::DimensionMismatch {
                expected: truth.len(),
                found: predicted.len(),
            });
        }
        let mut confusion = vec![vec![0usize; num_classes]; num_classes];
        for (&t, &p) in truth.iter().zip(predicted) {
            for label in [t, p] {
                if label == 0 || label > num_classes {
                    return Err(Error::InvalidLabel { label, num_classes });
                }
            }
            confusion[t - 1][p - 1] += 1;
        }
        Ok(Self::from_confusion(confusion))
    }

    pub fn from_confusion(confusion: Vec<Vec<usize>>) -> Self {
        let l = confusion.len();
        let row: Vec<f64> = confusion
            .iter()
            .map(|r| r.iter().sum::<usize>() as f64)
            .collect();
        let col: Vec<f64> = (0..l)
            .map(|j| confusion.iter().map(|r| r[j]).sum::<usize>() as f64)
            .collect();
        let total: f64 = row.iter().sum();
        let diag: Vec<f64> = (0..l).map(|i| confusion[i][i] as f64).collect();
        let correct: f64 = diag.iter().sum();

        let recalls: Vec<f64> = (0..l)
            .filter(|&i| row[i] > 0.0)
            .map(|i| diag[i] / row[i])
            .collect();
        let balanced_accuracy = if recalls.is_empty() {
            0.0
        } else {
            recalls.iter().sum::<f64>() / recalls.len() as f64
        };

        let f1_macro = (0..l)
            .map(|i| {
                let denom = row[i] + col[i];
                if denom == 0.0 {
                    0.0
                } else {
                    2.0 * diag[i] / denom
                }
            })
            .sum::<f64>()
            / l as f64;

        let (accuracy, cohen_kappa) = if total == 0.0 {
            (0.0, 0.0)
        } else {
            let p_o = correct / total;
            let p_e = (0..l).map(|i| row[i] * col[i]).sum::<f64>() / (total * total);
            let kappa = if p_e >= 1.0 {
                0.0
            } else {
                (p_o - p_e) / (1.0 - p_e)
            };
            (p_o, kappa)
        };

        Self {
            confusion,
            accuracy,
            balanced_accuracy,
            f1_macro,
            cohen_kappa,
        }
    }
}

fn check_pair(xs: &[f64], ys: &[f64]) -> Result<()> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            expected: xs.len(),
            found: ys.len(),
        });
    }
    if xs.len() < 2 {
        return Err(Error::UndefinedCorrelation(
            "need at least two points".into(),
        ));
    }
    Ok(())
}

fn centered_moments(xs: &[f64], ys: &[f64]) -> (f64, f64, f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    (mx, my, sxx, syy, sxy)
}

// compared on the inputs: centred moments of equal values can be off by an ulp
fn constant(v: &[f64]) -> bool {
    v.iter().all(|x| *x == v[0])
}

/// Sample Pearson correlation coefficient.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    check_pair(xs, ys)?;
    let (_, _, sxx, syy, sxy) = centered_moments(xs, ys);
    if constant(xs) || constant(ys) {
        return Err(Error::UndefinedCorrelation("zero variance".into()));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Ordinary least-squares line `y = slope * x + intercept`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    check_pair(xs, ys)?;
    let (mx, my, sxx, syy, sxy) = centered_moments(xs, ys);
    if constant(xs) {
        return Err(Error::UndefinedCorrelation("zero variance in x".into()));
    }
    let slope = sxy / sxx;
    let r_squared = if constant(ys) {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    Ok(LinearFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_predictions() {
        let r = MetricsReport::from_labels(&[1, 2, 3, 1], &[1, 2, 3, 1], 3).unwrap();
        assert_eq!(r.balanced_accuracy, 1.0);
        assert_eq!(r.f1_macro, 1.0);
        assert_eq!(r.cohen_kappa, 1.0);
    }

    #[test]
    fn constant_predictions_are_chance_level() {
        let r = MetricsReport::from_labels(&[1, 1, 2, 2], &[1, 1, 1, 1], 2).unwrap();
        assert_eq!(r.balanced_accuracy, 0.5);
        assert_eq!(r.cohen_kappa, 0.0);
        assert_eq!(r.confusion, vec![vec![2, 0], vec![2, 0]]);
    }

    #[test]
    fn two_by_two_confusion() {
        let r = MetricsReport::from_confusion(vec![vec![2, 1], vec![1, 2]]);
        assert!((r.balanced_accuracy - 2.0 / 3.0).abs() < 1e-15);
        assert!((r.cohen_kappa - 1.0 / 3.0).abs() < 1e-15);
        assert!((r.f1_macro - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn absent_class_scores_zero_f1() {
        let r = MetricsReport::from_labels(&[1, 2], &[1, 2], 3).unwrap();
        assert!((r.f1_macro - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(r.balanced_accuracy, 1.0);
    }

    #[test]
    fn everything_in_one_class_has_zero_kappa() {
        let r = MetricsReport::from_labels(&[2, 2], &[2, 2], 2).unwrap();
        assert_eq!(r.cohen_kappa, 0.0);
    }

    #[test]
    fn label_errors() {
        assert_eq!(
            MetricsReport::from_labels(&[], &[], 2),
            Err(Error::EmptyDataset)
        );
        assert!(matches!(
            MetricsReport::from_labels(&[1, 3], &[1, 1], 2),
            Err(Error::InvalidLabel { label: 3, .. })
        ));
    }

    #[test]
    fn pearson_examples() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let up: Vec<f64> = xs.iter().map(|x| 2.0 * x + 1.0).collect();
        let down: Vec<f64> = xs.iter().map(|x| -x).collect();
        assert!((pearson(&xs, &up).unwrap() - 1.0).abs() < 1e-15);
        assert!((pearson(&xs, &down).unwrap() + 1.0).abs() < 1e-15);
        assert!((pearson(&[1.0, 2.0, 3.0], &[1.0, 3.0, 2.0]).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(
            pearson(&[1.0, 1.0], &[1.0, 2.0]),
            Err(Error::UndefinedCorrelation(_))
        ));
        assert!(matches!(
            pearson(&[1.0], &[1.0]),
            Err(Error::UndefinedCorrelation(_))
        ));
    }

    #[test]
    fn line_fit() {
        let f = linear_fit(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-15);
        assert!((f.intercept - 1.0).abs() < 1e-15);
        assert!((f.r_squared - 1.0).abs() < 1e-15);
    }

    #[test]
    fn repeated_values_have_no_correlation() {
        let xs = [0.1, 0.1, 0.1];
        assert!(matches!(
            pearson(&xs, &[0.2, 0.5, 0.9]),
            Err(Error::UndefinedCorrelation(_))
        ));
        assert!(linear_fit(&xs, &[0.2, 0.5, 0.9]).is_err());
        let fit = linear_fit(&[0.2, 0.5, 0.9], &xs).unwrap();
        assert_eq!(fit.r_squared, 1.0);
    }
}
