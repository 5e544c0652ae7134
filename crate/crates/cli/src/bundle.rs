//! Model files written by `qsd train`: the core model document plus the
//! original class names and the fitted scaler, if any.

use std::path::Path;

use qsd::classify::{Prediction, TrainedModel};
use qsd::FeatureVector;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::output::write_atomic;
use crate::split::MinMaxScaler;

pub const BUNDLE_VERSION: &str = "qsd-cli-model/1";

#[derive(Serialize, Deserialize)]
struct BundleJson {
    version: String,
    class_names: Vec<String>,
    scaler: Option<MinMaxScaler>,
    model: serde_json::Value,
}

#[derive(Clone, Debug)]
pub struct ModelBundle {
    pub model: TrainedModel,
    pub class_names: Vec<String>,
    pub scaler: Option<MinMaxScaler>,
}

impl ModelBundle {
    pub fn to_json(&self) -> String {
        let model = serde_json::from_str(&self.model.to_json()).expect("model json parses");
        let doc = BundleJson {
            version: BUNDLE_VERSION.into(),
            class_names: self.class_names.clone(),
            scaler: self.scaler.clone(),
            model,
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("bundle serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        let doc: BundleJson =
            serde_json::from_str(text).map_err(|e| CliError::Data(format!("model file: {e}")))?;
        if doc.version != BUNDLE_VERSION {
            return Err(CliError::Data(format!(
                "model file version '{}', expected '{BUNDLE_VERSION}'",
                doc.version
            )));
        }
        let model = TrainedModel::from_json(&doc.model.to_string())?;
        if doc.class_names.len() != model.num_classes() {
            return Err(CliError::Data(format!(
                "model file lists {} class names for {} classes",
                doc.class_names.len(),
                model.num_classes()
            )));
        }
        if let Some(s) = &doc.scaler {
            if s.min.len() != model.feature_dim() || s.max.len() != model.feature_dim() {
                return Err(CliError::Data(
                    "scaler dimension does not match the model".into(),
                ));
            }
        }
        Ok(Self {
            model,
            class_names: doc.class_names,
            scaler: doc.scaler,
        })
    }

    pub fn save(&self, path: &Path) -> CliResult<()> {
        write_atomic(path, self.to_json().as_bytes())
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn predict(&self, x: &FeatureVector) -> CliResult<Prediction> {
        let x = match &self.scaler {
            Some(s) => s.transform(x)?,
            None => x.clone(),
        };
        Ok(self.model.predict(&x)?)
    }

    /// Class index (1-based) of a raw label string.
    pub fn class_of(&self, name: &str) -> Option<usize> {
        self.class_names
            .iter()
            .position(|n| n == name)
            .map(|i| i + 1)
    }
}
