//! JSON persistence for trained models.
//!
//! Matrices are stored row-major with explicit dimension and complex entries
//! as `[re, im]` pairs. The document carries the version tag `qsd-model/1`.

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::classify::{ClassifierKind, TrainedModel};
use crate::discrimination::Measurement;
use crate::error::{Error, Result};
use crate::hermitian::{c64, DensityMatrix, HermitianMatrix};

pub const MODEL_VERSION: &str = "qsd-model/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub entries: Vec<[f64; 2]>,
}

impl MatrixJson {
    pub fn from_hermitian(m: &HermitianMatrix) -> Self {
        let dim = m.dim();
        let mut entries = Vec::with_capacity(dim * dim);
        for j in 0..dim {
            for k in 0..dim {
                let z = m.get(j, k);
                entries.push([z.re, z.im]);
            }
        }
        Self { dim, entries }
    }

    pub fn to_hermitian(&self) -> Result<HermitianMatrix> {
        if self.entries.len() != self.dim * self.dim {
            return Err(Error::Model(format!(
                "matrix of dim {} has {} entries",
                self.dim,
                self.entries.len()
            )));
        }
        let d = self.dim;
        HermitianMatrix::new(Mat::from_fn(d, d, |j, k| {
            let [re, im] = self.entries[j * d + k];
            c64::new(re, im)
        }))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct ModelJson {
    version: String,
    kind: ClassifierKind,
    copies: usize,
    feature_dim: usize,
    priors: Vec<f64>,
    centroids: Vec<MatrixJson>,
    effects: Vec<MatrixJson>,
    bound: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    full_rank_sigma: Option<bool>,
}

impl TrainedModel {
    pub fn to_json(&self) -> String {
        let doc = ModelJson {
            version: MODEL_VERSION.to_string(),
            kind: self.kind(),
            copies: self.copies(),
            feature_dim: self.feature_dim(),
            priors: self.priors().to_vec(),
            centroids: self
                .centroids()
                .iter()
                .map(|c| MatrixJson::from_hermitian(c.as_hermitian()))
                .collect(),
            effects: self
                .measurement()
                .effects()
                .iter()
                .map(MatrixJson::from_hermitian)
                .collect(),
            bound: self.bound(),
            full_rank_sigma: self.full_rank_sigma(),
        };
        serde_json::to_string_pretty(&doc).expect("model serializes")
    }

    /// Parses and validates a model document.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ModelJson = serde_json::from_str(text).map_err(|e| Error::Model(e.to_string()))?;
        if doc.version != MODEL_VERSION {
            return Err(Error::Model(format!(
                "unsupported version '{}', expected '{MODEL_VERSION}'",
                doc.version
            )));
        }
        let centroids = doc
            .centroids
            .iter()
            .map(|m| DensityMatrix::new(m.to_hermitian()?))
            .collect::<Result<Vec<_>>>()?;
        let effects = doc
            .effects
            .iter()
            .map(MatrixJson::to_hermitian)
            .collect::<Result<Vec<_>>>()?;
        TrainedModel::from_parts(
            doc.kind,
            doc.copies,
            doc.feature_dim,
            doc.priors,
            centroids,
            Measurement::new(effects)?,
            doc.bound,
            doc.full_rank_sigma,
        )
    }
}
