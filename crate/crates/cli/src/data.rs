//! Dataset ingestion, synthetic generators and CSV export.

use std::path::Path;
use std::str::FromStr;

use qsd::encoding::copies_centroid;
use qsd::hermitian::DensityMatrix;
use qsd::{Dataset, Ensemble, FeatureVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Open01, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::output::write_atomic;

/// Which CSV column holds the class label. Indices are 0-based.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelColumn {
    #[default]
    Last,
    Index(usize),
    Name(String),
}

impl FromStr for LabelColumn {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err("label column must not be empty".into());
        }
        if s == "last" {
            return Ok(LabelColumn::Last);
        }
        Ok(match s.parse::<usize>() {
            Ok(i) => LabelColumn::Index(i),
            Err(_) => LabelColumn::Name(s.to_string()),
        })
    }
}

/// Parsed CSV contents before labels are mapped to class indices.
#[derive(Clone, Debug, PartialEq)]
pub struct RawTable {
    pub header: Option<Vec<String>>,
    pub features: Vec<Vec<f64>>,
    /// Raw label cells, present when a label column was requested.
    pub labels: Option<Vec<String>>,
}

fn read_records(path: &Path, delimiter: u8) -> CliResult<Vec<(u64, Vec<String>)>> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .delimiter(delimiter)
        .trim(csv::Trim::All)
        .from_reader(file);
    let mut out = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => CliError::Data(format!("{}: {e}", path.display())),
            csv::ErrorKind::UnequalLengths {
                pos,
                expected_len,
                len,
            } => CliError::Data(format!(
                "{}: row {}: expected {expected_len} fields, found {len}",
                path.display(),
                pos.as_ref().map_or(0, |p| p.line()),
            )),
            _ => CliError::Data(format!("{}: {e}", path.display())),
        })?;
        let line = rec.position().map_or(out.len() as u64 + 1, |p| p.line());
        out.push((line, rec.iter().map(str::to_string).collect()));
    }
    Ok(out)
}

/// Reads a delimited file of numeric features and, if `label_column` is
/// given, one label column. A first row with a non-empty, non-numeric
/// feature cell is taken as a header; naming the label column forces one.
pub fn read_csv(
    path: &Path,
    label_column: Option<&LabelColumn>,
    delimiter: u8,
) -> CliResult<RawTable> {
    let records = read_records(path, delimiter)?;
    let Some((_, first)) = records.first() else {
        return Err(CliError::Data(format!(
            "{}: file has no rows",
            path.display()
        )));
    };
    let width = first.len();
    let label_idx = match label_column {
        None => None,
        Some(LabelColumn::Last) => Some(width - 1),
        Some(LabelColumn::Index(i)) if *i < width => Some(*i),
        Some(LabelColumn::Index(i)) => {
            return Err(CliError::Data(format!(
                "{}: label column {i} out of range for {width} columns",
                path.display()
            )))
        }
        Some(LabelColumn::Name(name)) => match first.iter().position(|c| c == name) {
            Some(i) => Some(i),
            None => {
                return Err(CliError::Data(format!(
                    "{}: no header column named '{name}'",
                    path.display()
                )))
            }
        },
    };
    if width < 1 + usize::from(label_idx.is_some()) {
        return Err(CliError::Data(format!(
            "{}: no feature columns",
            path.display()
        )));
    }
    let has_header = matches!(label_column, Some(LabelColumn::Name(_)))
        || first.iter().enumerate().any(|(c, cell)| {
            Some(c) != label_idx && !cell.is_empty() && cell.parse::<f64>().is_err()
        });
    let header = has_header.then(|| first.clone());

    let mut features = Vec::new();
    let mut labels = label_idx.map(|_| Vec::new());
    for (line, rec) in &records[usize::from(has_header)..] {
        let mut row = Vec::with_capacity(width);
        for (c, cell) in rec.iter().enumerate() {
            if Some(c) == label_idx {
                if cell.is_empty() {
                    return Err(cell_error(
                        path,
                        *line,
                        c,
                        header.as_deref(),
                        "missing label",
                    ));
                }
                labels.as_mut().unwrap().push(cell.clone());
                continue;
            }
            if cell.is_empty() {
                return Err(cell_error(
                    path,
                    *line,
                    c,
                    header.as_deref(),
                    "missing value",
                ));
            }
            match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => row.push(v),
                _ => {
                    return Err(cell_error(
                        path,
                        *line,
                        c,
                        header.as_deref(),
                        &format!("'{cell}' is not a finite number"),
                    ))
                }
            }
        }
        features.push(row);
    }
    if features.is_empty() {
        return Err(CliError::Data(format!(
            "{}: file has a header but no data rows",
            path.display()
        )));
    }
    Ok(RawTable {
        header,
        features,
        labels,
    })
}

fn cell_error(
    path: &Path,
    line: u64,
    col: usize,
    header: Option<&[String]>,
    what: &str,
) -> CliError {
    let name = header.map(|h| format!(" ({})", h[col])).unwrap_or_default();
    CliError::Data(format!(
        "{}: row {line}, column {}{name}: {what}",
        path.display(),
        col + 1
    ))
}

/// Maps label strings to classes `1..=ℓ` in order of first appearance.
pub fn map_labels(raw: &[String]) -> (Vec<usize>, Vec<String>) {
    let mut names: Vec<String> = Vec::new();
    let labels = raw
        .iter()
        .map(|l| match names.iter().position(|n| n == l) {
            Some(i) => i + 1,
            None => {
                names.push(l.clone());
                names.len()
            }
        })
        .collect();
    (labels, names)
}

/// Loads a labelled dataset; class names keep the original label strings.
pub fn ingest_csv(path: &Path, label_column: &LabelColumn, delimiter: u8) -> CliResult<Dataset> {
    let table = read_csv(path, Some(label_column), delimiter)?;
    let (labels, names) = map_labels(table.labels.as_deref().unwrap());
    if names.len() < 2 {
        return Err(qsd::Error::TooFewClasses { found: names.len() }.into());
    }
    let points = table
        .features
        .into_iter()
        .zip(labels)
        .map(|(v, l)| FeatureVector::labeled(v, l))
        .collect::<qsd::Result<Vec<_>>>()?;
    Ok(Dataset::new(points, names.len())?.with_class_names(names)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "lowercase")]
pub enum SyntheticSpec {
    /// Isotropic Gaussian clusters, one per center.
    Blobs {
        centers: Vec<Vec<f64>>,
        points_per_class: usize,
        spread: f64,
    },
    /// Two classes of two points `(t, 1 - t)`, `t` uniform in (0, 1).
    Diagonal2x2,
    /// Features uniform in (0, 1).
    Uniform {
        classes: usize,
        points_per_class: usize,
        dim: usize,
    },
}

impl SyntheticSpec {
    pub fn name(&self) -> &'static str {
        match self {
            SyntheticSpec::Blobs { .. } => "blobs",
            SyntheticSpec::Diagonal2x2 => "diagonal2x2",
            SyntheticSpec::Uniform { .. } => "uniform",
        }
    }

    /// `classes` blobs centred at `(5k, ..., 5k)` for `k = 0..classes`.
    pub fn default_blobs(classes: usize, dim: usize, points_per_class: usize, spread: f64) -> Self {
        SyntheticSpec::Blobs {
            centers: (0..classes).map(|k| vec![5.0 * k as f64; dim]).collect(),
            points_per_class,
            spread,
        }
    }

    fn validate(&self) -> CliResult<()> {
        let bad = |m: String| Err(CliError::Usage(m));
        match self {
            SyntheticSpec::Blobs {
                centers,
                points_per_class,
                spread,
            } => {
                if centers.len() < 2 {
                    return bad(format!(
                        "blobs need at least 2 centers, got {}",
                        centers.len()
                    ));
                }
                let d = centers[0].len();
                if d == 0 || centers.iter().any(|c| c.len() != d) {
                    return bad("blob centers must share one nonzero dimension".into());
                }
                if centers.iter().flatten().any(|v| !v.is_finite()) {
                    return bad("blob centers must be finite".into());
                }
                if *points_per_class == 0 {
                    return bad("points per class must be at least 1".into());
                }
                if !(spread.is_finite() && *spread >= 0.0) {
                    return bad(format!(
                        "spread must be finite and nonnegative, got {spread}"
                    ));
                }
            }
            SyntheticSpec::Diagonal2x2 => {}
            SyntheticSpec::Uniform {
                classes,
                points_per_class,
                dim,
            } => {
                if *classes < 2 || *points_per_class == 0 || *dim == 0 {
                    return bad(
                        "uniform needs classes >= 2, points per class >= 1, dim >= 1".into(),
                    );
                }
            }
        }
        Ok(())
    }
}

pub fn generate_synthetic(spec: &SyntheticSpec, seed: u64) -> CliResult<Dataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::new();
    let classes = match spec {
        SyntheticSpec::Blobs {
            centers,
            points_per_class,
            spread,
        } => {
            for (k, c) in centers.iter().enumerate() {
                for _ in 0..*points_per_class {
                    let v = c
                        .iter()
                        .map(|x| x + spread * rng.sample::<f64, _>(StandardNormal))
                        .collect();
                    points.push(FeatureVector::labeled(v, k + 1)?);
                }
            }
            centers.len()
        }
        SyntheticSpec::Diagonal2x2 => {
            for label in [1, 1, 2, 2] {
                let t: f64 = rng.sample(Open01);
                points.push(FeatureVector::labeled(vec![t, 1.0 - t], label)?);
            }
            2
        }
        SyntheticSpec::Uniform {
            classes,
            points_per_class,
            dim,
        } => {
            for k in 1..=*classes {
                for _ in 0..*points_per_class {
                    let v = (0..*dim).map(|_| rng.sample(Open01)).collect();
                    points.push(FeatureVector::labeled(v, k)?);
                }
            }
            *classes
        }
    };
    let names = (1..=classes).map(|k| k.to_string()).collect();
    Ok(Dataset::new(points, classes)?.with_class_names(names)?)
}

/// Reads every point as the diagonal of a density matrix (nonnegative
/// entries summing to 1) and builds the `copies`-copy class centroids.
pub fn diagonal_ensemble(ds: &Dataset, copies: usize, cap: usize) -> CliResult<Ensemble> {
    let m = ds.len() as f64;
    let mut entries = Vec::with_capacity(ds.num_classes());
    for label in 1..=ds.num_classes() {
        let states = ds
            .class_members(label)
            .map(|x| DensityMatrix::from_diagonal(x.values()))
            .collect::<qsd::Result<Vec<_>>>()?;
        let prior = states.len() as f64 / m;
        entries.push((prior, copies_centroid(&states, copies, cap)?));
    }
    Ok(Ensemble::new(entries)?)
}

fn class_name(ds: &Dataset, label: usize) -> String {
    ds.class_names()
        .map(|n| n[label - 1].clone())
        .unwrap_or_else(|| label.to_string())
}

/// CSV text with header `f1,...,fd,label`.
pub fn dataset_to_csv(ds: &Dataset) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = (1..=ds.feature_dim()).map(|i| format!("f{i}")).collect();
    header.push("label".into());
    w.write_record(&header)
        .map_err(|e| CliError::Data(e.to_string()))?;
    for x in ds.points() {
        let mut row: Vec<String> = x.values().iter().map(|v| v.to_string()).collect();
        row.push(class_name(ds, x.label().unwrap()));
        w.write_record(&row)
            .map_err(|e| CliError::Data(e.to_string()))?;
    }
    w.into_inner().map_err(|e| CliError::Data(e.to_string()))
}

pub fn write_dataset_csv(ds: &Dataset, path: &Path) -> CliResult<()> {
    write_atomic(path, &dataset_to_csv(ds)?)
}
