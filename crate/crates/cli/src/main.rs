//! `gwknn`: run nearest-neighbor classification experiments from the shell.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gwknn::bootstrap::{hamamoto_bootstrap, BootstrapConfig};
use gwknn::classifiers::GaussianWeightParams;
use gwknn::data::{
    compute_pattern_stats, csv_string, load_csv, load_patterns_csv, normalize_patterns, apply_normalization,
    CsvOptions, LabelColumn, NormalizationStats,
};
use gwknn::evaluation::{
    cross_validate, derive_seed, evaluate_dataset, normalize_pair, render_table, reports_to_json, ClassifierConfig,
    ClassifierKind, CvGrid, DatasetSpec, ExperimentSettings, NormalizationMode, TestSpec,
};
use gwknn::Error;

#[derive(Debug, Parser)]
#[command(name = "gwknn", version, about = "Gaussian-weighted k-NN classification experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Normalize, cross-validate, and report accuracy over resampled test sets.
    Evaluate(EvaluateArgs),
    /// Select k (and r) by cross-validation on a training file.
    CrossValidate(CrossValidateArgs),
    /// Write a Hamamoto bootstrapped copy of a training file.
    Bootstrap(BootstrapArgs),
    /// Classify the rows of a query file.
    Classify(ClassifyArgs),
}

#[derive(Debug, Args)]
struct CsvArgs {
    /// Label column: zero-based index, header name, or "last".
    #[arg(long = "label-col", default_value = "last")]
    label_col: LabelColumn,
    /// Field delimiter (a single character; "tab" for \t).
    #[arg(long, default_value = ",", value_parser = parse_delimiter)]
    delimiter: u8,
    /// Input files start with a header row.
    #[arg(long)]
    header: bool,
}

impl CsvArgs {
    fn options(&self) -> CsvOptions {
        CsvOptions {
            delimiter: self.delimiter,
            has_header: self.header,
            label_column: self.label_col.clone(),
        }
    }
}

#[derive(Debug, Args)]
struct ProtocolArgs {
    /// Comma-separated classifiers: nnc, knnc, wknnc, knnc-hbs, gwknnc, or all.
    #[arg(long, default_value = "all", value_parser = parse_classifiers)]
    classifiers: ClassifierList,
    /// Gaussian kernel width.
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// Candidate k values, comma-separated (default: odd 1..31).
    #[arg(long = "grid-k", value_delimiter = ',')]
    grid_k: Option<Vec<usize>>,
    /// Candidate r values, comma-separated (default: 1,2,3,5,7,10).
    #[arg(long = "grid-r", value_delimiter = ',')]
    grid_r: Option<Vec<usize>>,
    /// Number of cross-validation folds.
    #[arg(long, default_value_t = 3)]
    folds: usize,
    /// Master seed; every random choice derives from it.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Normalization statistics: pooled (train+test), train, or none.
    #[arg(long, default_value = "pooled")]
    norm: NormalizationMode,
    /// Count a pattern among its own same-class neighbors when bootstrapping.
    #[arg(long = "include-self")]
    include_self: bool,
}

impl ProtocolArgs {
    fn grid(&self) -> Result<CvGrid, Error> {
        let default = CvGrid::default();
        CvGrid::new(
            self.grid_k.clone().unwrap_or_else(|| default.k().to_vec()),
            self.grid_r.clone().unwrap_or_else(|| default.r().to_vec()),
        )
    }
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    /// Training CSV.
    #[arg(long)]
    train: PathBuf,
    /// Test CSV.
    #[arg(long, conflicts_with = "split_train", required_unless_present = "split_train")]
    test: Option<PathBuf>,
    /// Split the training file randomly, keeping N patterns for training.
    #[arg(long = "split-train", value_name = "N")]
    split_train: Option<usize>,
    /// Dataset name in reports (default: training file stem).
    #[arg(long)]
    name: Option<String>,
    #[command(flatten)]
    csv: CsvArgs,
    #[command(flatten)]
    protocol: ProtocolArgs,
    /// Fix k instead of selecting it.
    #[arg(long)]
    k: Option<usize>,
    /// Fix r instead of selecting it.
    #[arg(long)]
    r: Option<usize>,
    /// Number of resampled test sets.
    #[arg(long, default_value_t = 10)]
    resamples: usize,
    /// Write the reports as JSON.
    #[arg(long = "out-json")]
    out_json: Option<PathBuf>,
    /// Write the markdown table.
    #[arg(long = "out-table")]
    out_table: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CrossValidateArgs {
    /// Training CSV.
    #[arg(long)]
    train: PathBuf,
    #[command(flatten)]
    csv: CsvArgs,
    #[command(flatten)]
    protocol: ProtocolArgs,
    /// Write the selections as JSON (default: stdout).
    #[arg(long = "out-json")]
    out_json: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BootstrapArgs {
    /// Training CSV.
    #[arg(long)]
    train: PathBuf,
    #[command(flatten)]
    csv: CsvArgs,
    /// Same-class neighbors averaged per pattern.
    #[arg(long)]
    r: usize,
    /// Count a pattern among its own neighbors.
    #[arg(long = "include-self")]
    include_self: bool,
    /// Output CSV (label in the last column).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    /// Training CSV.
    #[arg(long)]
    train: PathBuf,
    /// Query CSV with the same feature columns.
    #[arg(long)]
    queries: PathBuf,
    /// Query rows also carry a label in the --label-col position; ignore it.
    #[arg(long = "query-has-label")]
    query_has_label: bool,
    #[command(flatten)]
    csv: CsvArgs,
    /// One of nnc, knnc, wknnc, knnc-hbs, gwknnc.
    #[arg(long, default_value = "gwknnc")]
    classifier: ClassifierKind,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, default_value_t = 1)]
    r: usize,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// Normalization statistics: pooled (train+queries), train, or none.
    #[arg(long, default_value = "pooled")]
    norm: NormalizationMode,
    #[arg(long = "include-self")]
    include_self: bool,
    /// Predictions CSV (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone)]
struct ClassifierList(Vec<ClassifierKind>);

fn parse_classifiers(s: &str) -> Result<ClassifierList, String> {
    let mut out = Vec::new();
    for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        if tok.eq_ignore_ascii_case("all") {
            out.extend(ClassifierKind::ALL);
        } else {
            out.push(tok.parse::<ClassifierKind>().map_err(|e| e.to_string())?);
        }
    }
    if out.is_empty() {
        return Err("no classifiers given".into());
    }
    let mut seen = Vec::new();
    out.retain(|k| {
        let fresh = !seen.contains(k);
        seen.push(*k);
        fresh
    });
    Ok(ClassifierList(out))
}

fn parse_delimiter(s: &str) -> Result<u8, String> {
    match s {
        "tab" | "\\t" | "\t" => Ok(b'\t'),
        _ if s.len() == 1 && s.is_ascii() => Ok(s.as_bytes()[0]),
        _ => Err(format!("delimiter must be a single ASCII character, got {s:?}")),
    }
}

/// A failure with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidK | Error::InvalidR | Error::InvalidSigma(_) | Error::InvalidSetting(_) => 1,
            Error::EmptyNeighbors | Error::MalformedNeighbors(_) => 3,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn write_out(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure {
        code: 2,
        message: format!("{}: {e}", path.display()),
    })
}

fn emit(path: Option<&Path>, contents: &str) -> Result<(), Failure> {
    match path {
        Some(p) => write_out(p, contents),
        None => io::stdout().write_all(contents.as_bytes()).map_err(|e| Failure {
            code: 3,
            message: format!("stdout: {e}"),
        }),
    }
}

fn evaluate(args: EvaluateArgs) -> Result<(), Failure> {
    let gaussian = GaussianWeightParams::new(args.protocol.sigma)?;
    let settings = ExperimentSettings {
        grid: args.protocol.grid()?,
        folds: args.protocol.folds,
        resamples: args.resamples,
        seed: args.protocol.seed,
        gaussian,
        include_self: args.protocol.include_self,
        normalization: args.protocol.norm,
        fixed_k: args.k,
        fixed_r: args.r,
    };
    let name = args.name.clone().unwrap_or_else(|| {
        args.train
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "dataset".into())
    });
    let test = match (&args.test, args.split_train) {
        (Some(path), _) => TestSpec::File(path.clone()),
        (None, Some(train_count)) => TestSpec::Split { train_count },
        (None, None) => unreachable!("clap requires --test or --split-train"),
    };
    let spec = DatasetSpec {
        name: name.clone(),
        train: args.train.clone(),
        test,
        csv: args.csv.options(),
    };
    let (train, test) = spec.load(settings.seed)?;
    let reports = evaluate_dataset(&name, &train, &test, &args.protocol.classifiers.0, &settings)?;

    let table = render_table(&reports);
    print!("{table}");
    if let Some(p) = &args.out_json {
        write_out(p, &reports_to_json(&reports))?;
    }
    if let Some(p) = &args.out_table {
        write_out(p, &table)?;
    }
    Ok(())
}

fn cross_validate_cmd(args: CrossValidateArgs) -> Result<(), Failure> {
    let gaussian = GaussianWeightParams::new(args.protocol.sigma)?;
    let grid = args.protocol.grid()?;
    let train = load_csv(&args.train, &args.csv.options())?;
    let train = match args.protocol.norm {
        NormalizationMode::None => train,
        _ => normalize_pair(&train, &train, NormalizationMode::TrainOnly)?.0,
    };
    let cv_seed = derive_seed(args.protocol.seed, 1);
    let mut out = Vec::new();
    for &kind in &args.protocol.classifiers.0 {
        let base = ClassifierConfig::new(kind)
            .with_gaussian(gaussian)
            .with_include_self(args.protocol.include_self);
        let sel = cross_validate(&train, &grid, &base, args.protocol.folds, cv_seed)?;
        out.push(serde_json::json!({
            "classifier": kind.name(),
            "k": sel.k,
            "r": sel.r,
            "cv_accuracy": sel.mean_ca(),
            "seed": args.protocol.seed,
        }));
    }
    let mut json = serde_json::to_string_pretty(&out).expect("json");
    json.push('\n');
    emit(args.out_json.as_deref(), &json)
}

fn bootstrap_cmd(args: BootstrapArgs) -> Result<(), Failure> {
    let cfg = BootstrapConfig::new(args.r, args.include_self)?;
    let train = load_csv(&args.train, &args.csv.options())?;
    let boot = hamamoto_bootstrap(&train, &cfg)?;
    write_out(&args.out, &csv_string(&boot, args.csv.delimiter, args.csv.header))?;
    for (name, count) in boot.registry().names().iter().zip(boot.class_counts()) {
        println!("{name}\t{count}");
    }
    Ok(())
}

fn classify_cmd(args: ClassifyArgs) -> Result<(), Failure> {
    let gaussian = GaussianWeightParams::new(args.sigma)?;
    let opts = args.csv.options();
    let train = load_csv(&args.train, &opts)?;
    let drop = args.query_has_label.then_some(&opts.label_column);
    let queries = load_patterns_csv(&args.queries, opts.delimiter, opts.has_header, drop)?;
    if queries.dim() != train.dim() {
        return Err(Error::DimensionMismatch {
            expected: train.dim(),
            found: queries.dim(),
        }
        .into());
    }
    let stats: Option<NormalizationStats> = match args.norm {
        NormalizationMode::None => None,
        NormalizationMode::Pooled => Some(compute_pattern_stats(&[train.patterns(), &queries])?),
        NormalizationMode::TrainOnly => Some(compute_pattern_stats(&[train.patterns()])?),
    };
    let (train, queries) = match &stats {
        Some(s) => (apply_normalization(&train, s)?, normalize_patterns(&queries, s)?),
        None => (train, queries),
    };

    let config = ClassifierConfig::new(args.classifier)
        .with_k(args.k)
        .with_r(args.r)
        .with_gaussian(gaussian)
        .with_include_self(args.include_self);
    let fitted = config.fit(&train)?;
    let decisions = fitted.classify_all(&queries)?;

    let names = train.registry().names();
    let mut out = String::from("predicted,tie");
    for n in names {
        out.push_str(&format!(",score_{n}"));
    }
    out.push('\n');
    for d in &decisions {
        out.push_str(&format!("{},{}", names[d.predicted.index()], d.tie));
        for s in &d.scores {
            out.push_str(&format!(",{s}"));
        }
        out.push('\n');
    }
    emit(args.out.as_deref(), &out)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Evaluate(a) => evaluate(a),
        Command::CrossValidate(a) => cross_validate_cmd(a),
        Command::Bootstrap(a) => bootstrap_cmd(a),
        Command::Classify(a) => classify_cmd(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
