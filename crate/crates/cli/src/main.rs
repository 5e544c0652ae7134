use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qsd::classify::train_capped;
use qsd::hermitian::DEFAULT_DIM_CAP;
use qsd::{ClassifierKind, FeatureVector, MetricsReport};
use qsd_cli::data::{dataset_to_csv, read_csv, write_dataset_csv};
use qsd_cli::experiment::delimiter_byte;
use qsd_cli::output::write_atomic;
use qsd_cli::study::synthetic_study_configs;
use qsd_cli::{
    bound_accuracy_study, run_experiment, CliError, CliResult, ExperimentConfig, Format, InputSpec,
    LabelColumn, MinMaxScaler, ModelBundle, Scaling, SplitSpec, SyntheticSpec,
};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "qsd",
    version,
    about = "Quantum state discrimination classifiers: train, evaluate, sweep copies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a classifier on a whole dataset and save the model.
    Train(TrainArgs),
    /// Label the rows of a CSV file with a saved model.
    Predict(PredictArgs),
    /// Score a saved model on a labelled CSV file.
    Evaluate(EvaluateArgs),
    /// Train and evaluate over a range of copy counts.
    Sweep(SweepArgs),
    /// Correlate the Helstrom bound with balanced accuracy across datasets.
    Study(StudyArgs),
    /// Write a synthetic dataset as CSV.
    Generate(GenerateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Generator {
    Blobs,
    Diagonal2x2,
    Uniform,
}

#[derive(Args)]
struct GeneratorArgs {
    /// Synthetic generator used instead of --input.
    #[arg(long, value_enum)]
    generator: Option<Generator>,
    #[arg(long, default_value_t = 2)]
    classes: usize,
    #[arg(long, default_value_t = 50)]
    points_per_class: usize,
    /// Feature dimension for blobs without --centers and for uniform.
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Blob centers, e.g. "0,0;5,5". Defaults to (5k, ..., 5k).
    #[arg(long)]
    centers: Option<String>,
    #[arg(long, default_value_t = 0.5)]
    spread: f64,
}

impl GeneratorArgs {
    fn spec(&self) -> CliResult<Option<SyntheticSpec>> {
        let Some(g) = self.generator else {
            return Ok(None);
        };
        Ok(Some(match g {
            Generator::Blobs => match &self.centers {
                Some(text) => SyntheticSpec::Blobs {
                    centers: parse_centers(text)?,
                    points_per_class: self.points_per_class,
                    spread: self.spread,
                },
                None => SyntheticSpec::default_blobs(
                    self.classes,
                    self.dim,
                    self.points_per_class,
                    self.spread,
                ),
            },
            Generator::Diagonal2x2 => SyntheticSpec::Diagonal2x2,
            Generator::Uniform => SyntheticSpec::Uniform {
                classes: self.classes,
                points_per_class: self.points_per_class,
                dim: self.dim,
            },
        }))
    }
}

fn parse_centers(text: &str) -> CliResult<Vec<Vec<f64>>> {
    text.split(';')
        .map(|c| {
            c.split(',')
                .map(|v| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|_| CliError::Usage(format!("bad center coordinate '{v}'")))
                })
                .collect()
        })
        .collect()
}

#[derive(Args)]
struct InputArgs {
    /// CSV dataset (RFC 4180, optional header).
    #[arg(
        long,
        required_unless_present = "generator",
        conflicts_with = "generator"
    )]
    input: Option<PathBuf>,
    /// Label column: header name, 0-based index, or "last".
    #[arg(long, default_value = "last")]
    label_column: LabelColumn,
    #[arg(long, default_value_t = ',')]
    delimiter: char,
    #[command(flatten)]
    generator: GeneratorArgs,
}

impl InputArgs {
    fn spec(&self) -> CliResult<InputSpec> {
        if let Some(spec) = self.generator.spec()? {
            return Ok(InputSpec::Synthetic(spec));
        }
        let path = self
            .input
            .clone()
            .expect("clap requires --input or --generator");
        delimiter_byte(self.delimiter)?;
        Ok(InputSpec::Csv {
            path,
            label_column: self.label_column.clone(),
            delimiter: self.delimiter,
        })
    }
}

#[derive(Args)]
struct SplitArgs {
    /// Held-out fraction for a stratified shuffle split.
    #[arg(long, conflicts_with = "folds")]
    test_fraction: Option<f64>,
    /// Stratified k-fold instead of a single split.
    #[arg(long)]
    folds: Option<usize>,
}

impl SplitArgs {
    fn spec(&self) -> SplitSpec {
        match (self.test_fraction, self.folds) {
            (_, Some(folds)) => SplitSpec::Kfold { folds },
            (Some(test_fraction), None) => SplitSpec::Holdout { test_fraction },
            (None, None) => SplitSpec::default(),
        }
    }
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum, default_value = "pgm")]
    classifier: Kind,
    #[arg(long, default_value_t = 1)]
    copies: usize,
    #[arg(long, value_enum, default_value = "none")]
    scale: Scaling,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_DIM_CAP)]
    dim_cap: usize,
    /// Model file to write.
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct PredictArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    input: PathBuf,
    /// Column to skip as a label; by default every column is a feature.
    #[arg(long)]
    label_column: Option<LabelColumn>,
    #[arg(long, default_value_t = ',')]
    delimiter: char,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "last")]
    label_column: LabelColumn,
    #[arg(long, default_value_t = ',')]
    delimiter: char,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum, default_value = "helstrom")]
    classifier: Kind,
    /// Copy counts as A..B (inclusive) or a single N.
    #[arg(long, default_value = "1..3", value_parser = parse_copies)]
    copies: (usize, usize),
    #[command(flatten)]
    split: SplitArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "none")]
    scale: Scaling,
    #[arg(long, default_value_t = DEFAULT_DIM_CAP)]
    dim_cap: usize,
    /// Include per-n wall times in the result file.
    #[arg(long)]
    timing: bool,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct StudyArgs {
    /// Binary CSV datasets; repeat the flag. Without it, synthetic blobs are used.
    #[arg(long)]
    input: Vec<PathBuf>,
    #[arg(long, default_value = "last")]
    label_column: LabelColumn,
    #[arg(long, default_value_t = ',')]
    delimiter: char,
    /// Number of synthetic datasets when no --input is given.
    #[arg(long, default_value_t = 10)]
    synthetic: usize,
    #[arg(long, default_value_t = 30)]
    points_per_class: usize,
    #[arg(long, default_value = "1", value_parser = parse_copies)]
    copies: (usize, usize),
    #[command(flatten)]
    split: SplitArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "none")]
    scale: Scaling,
    #[arg(long, default_value_t = DEFAULT_DIM_CAP)]
    dim_cap: usize,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    generator: GeneratorArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Helstrom,
    Pgm,
}

impl From<Kind> for ClassifierKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Helstrom => ClassifierKind::Helstrom,
            Kind::Pgm => ClassifierKind::Pgm,
        }
    }
}

fn parse_copies(s: &str) -> Result<(usize, usize), String> {
    let parse = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|_| format!("bad copy count '{t}'"))
    };
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
        None => {
            let n = parse(s)?;
            (n, n)
        }
    };
    if a == 0 || a > b {
        return Err(format!("copy range {a}..{b} must satisfy 1 <= A <= B"));
    }
    Ok((a, b))
}

fn emit(output: Option<&Path>, text: &str) -> CliResult<()> {
    match output {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::io("<stdout>", e)),
    }
}

fn train(args: TrainArgs) -> CliResult<()> {
    let spec = args.input.spec()?;
    let ds = spec.load(args.seed)?;
    let (ds, scaler) = match args.scale {
        Scaling::None => (ds, None),
        Scaling::Minmax => {
            let s = MinMaxScaler::fit(&ds);
            (s.transform_dataset(&ds)?, Some(s))
        }
    };
    let model = train_capped(&ds, args.classifier.into(), args.copies, args.dim_cap)?;
    let class_names = ds.class_names().map(<[String]>::to_vec).unwrap_or_default();
    eprintln!(
        "trained {} on {} points, n={}, dim {}, bound {}",
        model.kind(),
        ds.len(),
        model.copies(),
        model.encoded_dim(),
        model.bound()
    );
    ModelBundle {
        model,
        class_names,
        scaler,
    }
    .save(&args.output)
}

#[derive(Serialize)]
struct PredictionRow {
    row: usize,
    label: String,
    scores: Vec<f64>,
}

#[derive(Serialize)]
struct PredictionsDoc {
    schema: &'static str,
    classes: Vec<String>,
    predictions: Vec<PredictionRow>,
}

fn predict(args: PredictArgs) -> CliResult<()> {
    let bundle = ModelBundle::load(&args.model)?;
    let table = read_csv(
        &args.input,
        args.label_column.as_ref(),
        delimiter_byte(args.delimiter)?,
    )?;
    let mut rows = Vec::with_capacity(table.features.len());
    for (i, values) in table.features.into_iter().enumerate() {
        let p = bundle.predict(&FeatureVector::new(values)?)?;
        rows.push(PredictionRow {
            row: i + 1,
            label: bundle.class_names[p.label - 1].clone(),
            scores: p.scores,
        });
    }
    let text = match args.format {
        Format::Json => {
            let doc = PredictionsDoc {
                schema: "qsd-predictions/1",
                classes: bundle.class_names.clone(),
                predictions: rows,
            };
            let mut s = serde_json::to_string_pretty(&doc).expect("predictions serialize");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut header = vec!["row".to_string(), "label".to_string()];
            header.extend(bundle.class_names.iter().map(|c| format!("score_{c}")));
            w.write_record(&header).expect("in-memory csv write");
            for r in &rows {
                let mut rec = vec![r.row.to_string(), r.label.clone()];
                rec.extend(r.scores.iter().map(f64::to_string));
                w.write_record(&rec).expect("in-memory csv write");
            }
            String::from_utf8(w.into_inner().expect("in-memory csv flush")).expect("utf-8 csv")
        }
    };
    emit(args.output.as_deref(), &text)
}

#[derive(Serialize)]
struct EvaluationDoc {
    schema: &'static str,
    classes: Vec<String>,
    m: usize,
    #[serde(flatten)]
    metrics: MetricsReport,
}

fn evaluate(args: EvaluateArgs) -> CliResult<()> {
    let bundle = ModelBundle::load(&args.model)?;
    let table = read_csv(
        &args.input,
        Some(&args.label_column),
        delimiter_byte(args.delimiter)?,
    )?;
    let raw = table.labels.unwrap();
    let mut truth = Vec::with_capacity(raw.len());
    let mut predicted = Vec::with_capacity(raw.len());
    for (values, label) in table.features.into_iter().zip(&raw) {
        let class = bundle.class_of(label).ok_or_else(|| {
            CliError::Data(format!("label '{label}' is not a class of the model"))
        })?;
        truth.push(class);
        predicted.push(bundle.predict(&FeatureVector::new(values)?)?.label);
    }
    let metrics = MetricsReport::from_labels(&truth, &predicted, bundle.model.num_classes())?;
    let doc = EvaluationDoc {
        schema: "qsd-evaluation/1",
        classes: bundle.class_names.clone(),
        m: truth.len(),
        metrics,
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("evaluation serializes");
    text.push('\n');
    emit(args.output.as_deref(), &text)
}

fn sweep(args: SweepArgs) -> CliResult<()> {
    let mut cfg = ExperimentConfig::new(args.input.spec()?, args.classifier.into());
    (cfg.copies_min, cfg.copies_max) = args.copies;
    cfg.split = args.split.spec();
    cfg.seed = args.seed;
    cfg.scaling = args.scale;
    cfg.dim_cap = args.dim_cap;
    cfg.record_timing = args.timing;
    cfg.format = args.format;
    cfg.output = args.output.clone();
    let result = run_experiment(&cfg)?;
    for r in &result.records {
        eprintln!(
            "n={} bound={} balanced_accuracy={} ({:.1} ms)",
            r.copies,
            r.bound(),
            r.balanced_accuracy,
            r.wall_time_ms.unwrap_or(0.0)
        );
    }
    if let Some(t) = &result.truncated {
        eprintln!("truncated at n={}: {}", t.at_copies, t.reason);
    }
    match &args.output {
        Some(_) => Ok(()),
        None => emit(None, &result.render(args.format)),
    }
}

fn study(args: StudyArgs) -> CliResult<()> {
    let mut cfgs = if args.input.is_empty() {
        synthetic_study_configs(
            args.synthetic,
            args.seed,
            args.points_per_class,
            args.copies.0,
        )
    } else {
        delimiter_byte(args.delimiter)?;
        args.input
            .iter()
            .map(|p| {
                let input = InputSpec::Csv {
                    path: p.clone(),
                    label_column: args.label_column.clone(),
                    delimiter: args.delimiter,
                };
                let mut c = ExperimentConfig::new(input, ClassifierKind::Helstrom);
                c.seed = args.seed;
                c
            })
            .collect()
    };
    for c in &mut cfgs {
        (c.copies_min, c.copies_max) = args.copies;
        c.split = args.split.spec();
        c.scaling = args.scale;
        c.dim_cap = args.dim_cap;
        c.format = args.format;
    }
    let report = bound_accuracy_study(&cfgs)?;
    match report.pearson {
        Some(p) if p > 0.0 => eprintln!("pearson {p} over {} rows (positive)", report.rows.len()),
        Some(p) => eprintln!("pearson {p} over {} rows (not positive)", report.rows.len()),
        None => eprintln!(
            "{}",
            report.note.as_deref().unwrap_or("correlation undefined")
        ),
    }
    emit(args.output.as_deref(), &report.render(args.format))
}

fn generate(args: GenerateArgs) -> CliResult<()> {
    let spec = args
        .generator
        .spec()?
        .ok_or_else(|| CliError::Usage("--generator is required".into()))?;
    let ds = qsd_cli::generate_synthetic(&spec, args.seed)?;
    match &args.output {
        Some(p) => write_dataset_csv(&ds, p),
        None => {
            let bytes = dataset_to_csv(&ds)?;
            emit(None, std::str::from_utf8(&bytes).expect("utf-8 csv"))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Train(a) => train(a),
        Command::Predict(a) => predict(a),
        Command::Evaluate(a) => evaluate(a),
        Command::Sweep(a) => sweep(a),
        Command::Study(a) => study(a),
        Command::Generate(a) => generate(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qsd: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
