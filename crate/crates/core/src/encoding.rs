//! Classical data and its quantum encoding.
//!
//! A feature vector `x ∈ R^d` is mapped to the pure state built from
//! `[x¹, …, x^d, 1] / sqrt(|x|² + 1)`. Classes are summarized by quantum
//! centroids, the uniform mixture of their members' states, optionally taken
//! over `n` tensor copies of every member.

use faer::Mat;

use crate::error::{Error, Result};
use crate::hermitian::{
    c64, check_same_dim, kron_capped, DensityMatrix, HermitianMatrix, DEFAULT_DIM_CAP,
};

/// A real feature vector with an optional 1-based class label.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureVector {
    values: Vec<f64>,
    label: Option<usize>,
}

impl FeatureVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyFeatureVector);
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFiniteFeature { index, value });
        }
        Ok(Self {
            values,
            label: None,
        })
    }

    pub fn labeled(values: Vec<f64>, label: usize) -> Result<Self> {
        Ok(Self {
            label: Some(label),
            ..Self::new(values)?
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn label(&self) -> Option<usize> {
        self.label
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }
}

/// Labelled training or test data. Labels run over `1..=num_classes` and every
/// class has at least one point.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    points: Vec<FeatureVector>,
    num_classes: usize,
    class_names: Option<Vec<String>>,
}

impl Dataset {
    pub fn new(points: Vec<FeatureVector>, num_classes: usize) -> Result<Self> {
        if num_classes < 2 {
            return Err(Error::TooFewClasses { found: num_classes });
        }
        let first = points.first().ok_or(Error::EmptyDataset)?;
        let d = first.dim();
        let mut sizes = vec![0usize; num_classes];
        for (index, p) in points.iter().enumerate() {
            check_same_dim(d, p.dim())?;
            let label = p.label.ok_or(Error::MissingLabel { index })?;
            if label == 0 || label > num_classes {
                return Err(Error::InvalidLabel { label, num_classes });
            }
            sizes[label - 1] += 1;
        }
        if let Some(empty) = sizes.iter().position(|&s| s == 0) {
            return Err(Error::DegenerateClass { class: empty + 1 });
        }
        Ok(Self {
            points,
            num_classes,
            class_names: None,
        })
    }

    pub fn with_class_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.num_classes {
            return Err(Error::Shape(format!(
                "{} class names for {} classes",
                names.len(),
                self.num_classes
            )));
        }
        self.class_names = Some(names);
        Ok(self)
    }

    pub fn points(&self) -> &[FeatureVector] {
        &self.points
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn class_names(&self) -> Option<&[String]> {
        self.class_names.as_deref()
    }

    pub fn feature_dim(&self) -> usize {
        self.points[0].dim()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn labels(&self) -> Vec<usize> {
        self.points.iter().map(|p| p.label.unwrap_or(0)).collect()
    }

    /// Number of points per class, indexed from class 1 at position 0.
    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.num_classes];
        for p in &self.points {
            if let Some(l) = p.label {
                sizes[l - 1] += 1;
            }
        }
        sizes
    }

    /// Points of class `label` (1-based), in dataset order.
    pub fn class_members(&self, label: usize) -> impl Iterator<Item = &FeatureVector> {
        self.points.iter().filter(move |p| p.label == Some(label))
    }
}

/// `(d + 1)^n`, or a capacity error when it exceeds `cap`.
pub fn encoded_dim(feature_dim: usize, copies: usize, cap: usize) -> Result<usize> {
    if copies == 0 {
        return Err(Error::ZeroCopies);
    }
    let base = feature_dim + 1;
    u32::try_from(copies)
        .ok()
        .and_then(|n| base.checked_pow(n))
        .filter(|&dim| dim <= cap)
        .ok_or_else(|| Error::Capacity {
            required: format!("({base})^{copies}"),
            cap,
        })
}

/// The normalized amplitude vector `[x¹, …, x^d, 1] / sqrt(|x|² + 1)`.
pub fn amplitudes(x: &FeatureVector) -> Vec<f64> {
    let norm = (x.values.iter().map(|v| v * v).sum::<f64>() + 1.0).sqrt();
    x.values
        .iter()
        .chain(std::iter::once(&1.0))
        .map(|v| v / norm)
        .collect()
}

/// Amplitudes of the `n`-fold tensor power of the encoded state.
pub fn copies_amplitudes(x: &FeatureVector, copies: usize, cap: usize) -> Result<Vec<c64>> {
    let dim = encoded_dim(x.dim(), copies, cap)?;
    let base = amplitudes(x);
    let mut out = vec![1.0f64];
    out.reserve(dim);
    for _ in 0..copies {
        out = out
            .iter()
            .flat_map(|a| base.iter().map(move |b| a * b))
            .collect();
    }
    debug_assert_eq!(out.len(), dim);
    Ok(out.into_iter().map(|a| c64::new(a, 0.0)).collect())
}

/// Amplitude encoding: the pure state `x̃ x̃†` of dimension `d + 1`.
pub fn amplitude_encode(x: &FeatureVector) -> DensityMatrix {
    let a: Vec<c64> = amplitudes(x)
        .into_iter()
        .map(|v| c64::new(v, 0.0))
        .collect();
    DensityMatrix::new_unchecked(HermitianMatrix::outer(&a))
}

/// `n`-fold Kronecker power of [`amplitude_encode`], capped at [`DEFAULT_DIM_CAP`].
pub fn encode_copies(x: &FeatureVector, copies: usize) -> Result<DensityMatrix> {
    encode_copies_capped(x, copies, DEFAULT_DIM_CAP)
}

pub fn encode_copies_capped(x: &FeatureVector, copies: usize, cap: usize) -> Result<DensityMatrix> {
    let a = copies_amplitudes(x, copies, cap)?;
    Ok(DensityMatrix::new_unchecked(HermitianMatrix::outer(&a)))
}

/// `n`-fold Kronecker power of an arbitrary state.
pub fn tensor_power(rho: &DensityMatrix, copies: usize, cap: usize) -> Result<DensityMatrix> {
    encoded_dim(rho.dim() - 1, copies, cap)?;
    let mut acc = rho.as_hermitian().clone();
    for _ in 1..copies {
        acc = kron_capped(&acc, rho.as_hermitian(), cap)?;
    }
    Ok(DensityMatrix::new_unchecked(acc))
}

/// Uniform convex combination of a class's states.
pub fn quantum_centroid(states: &[DensityMatrix]) -> Result<DensityMatrix> {
    if states.is_empty() {
        return Err(Error::DegenerateClass { class: 0 });
    }
    DensityMatrix::uniform_mixture(states)
}

/// Average of the `n`-fold tensor powers of `states`. For `n >= 2` this is not
/// the tensor power of the centroid.
pub fn copies_centroid(
    states: &[DensityMatrix],
    copies: usize,
    cap: usize,
) -> Result<DensityMatrix> {
    let powers = states
        .iter()
        .map(|s| tensor_power(s, copies, cap))
        .collect::<Result<Vec<_>>>()?;
    quantum_centroid(&powers)
}

/// Priors `|S^i| / m` and `n`-copy centroids for every class, in class order.
pub fn class_centroids(ds: &Dataset, copies: usize) -> Result<Vec<(f64, DensityMatrix)>> {
    class_centroids_capped(ds, copies, DEFAULT_DIM_CAP)
}

pub fn class_centroids_capped(
    ds: &Dataset,
    copies: usize,
    cap: usize,
) -> Result<Vec<(f64, DensityMatrix)>> {
    let dim = encoded_dim(ds.feature_dim(), copies, cap)?;
    let m = ds.len() as f64;
    (1..=ds.num_classes())
        .map(|label| {
            let mut acc = Mat::<c64>::zeros(dim, dim);
            let mut count = 0usize;
            for x in ds.class_members(label) {
                let a = copies_amplitudes(x, copies, cap)?;
                for j in 0..dim {
                    for k in 0..dim {
                        acc[(j, k)] += a[j] * a[k].conj();
                    }
                }
                count += 1;
            }
            if count == 0 {
                return Err(Error::DegenerateClass { class: label });
            }
            let w = 1.0 / count as f64;
            let centroid =
                HermitianMatrix::hermitian_part(Mat::from_fn(dim, dim, |j, k| acc[(j, k)] * w));
            Ok((count as f64 / m, DensityMatrix::new_unchecked(centroid)))
        })
        .collect()
}

/// The encoded training set: one pure `n`-copy state per point.
#[derive(Clone, Debug)]
pub struct QuantumDataset {
    states: Vec<(DensityMatrix, usize)>,
    copies: usize,
    encoded_dim: usize,
}

impl QuantumDataset {
    pub fn encode(ds: &Dataset, copies: usize) -> Result<Self> {
        Self::encode_capped(ds, copies, DEFAULT_DIM_CAP)
    }

    pub fn encode_capped(ds: &Dataset, copies: usize, cap: usize) -> Result<Self> {
        let encoded_dim = encoded_dim(ds.feature_dim(), copies, cap)?;
        let states = ds
            .points()
            .iter()
            .map(|p| {
                Ok((
                    encode_copies_capped(p, copies, cap)?,
                    p.label().unwrap_or(0),
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            states,
            copies,
            encoded_dim,
        })
    }

    pub fn states(&self) -> &[(DensityMatrix, usize)] {
        &self.states
    }

    pub fn copies(&self) -> usize {
        self.copies
    }

    pub fn encoded_dim(&self) -> usize {
        self.encoded_dim
    }
}
