use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;

use super::{bootstrap_resample_eval, check_compatible, cross_validate, ClassifierConfig, ClassifierKind, CvGrid, EvalReport};
use crate::classifiers::GaussianWeightParams;
use crate::data::{
    apply_normalization, compute_normalization, load_csv, load_csv_with_registry, random_split, CsvOptions,
    LabeledDataset,
};
use crate::error::{Error, Result};

/// Which patterns feed the z-score statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum NormalizationMode {
    /// Training and test sets together.
    #[default]
    Pooled,
    TrainOnly,
    None,
}

impl FromStr for NormalizationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pooled" => Ok(NormalizationMode::Pooled),
            "train" => Ok(NormalizationMode::TrainOnly),
            "none" => Ok(NormalizationMode::None),
            _ => Err(Error::InvalidSetting(format!("unknown normalization mode {s:?}"))),
        }
    }
}

impl fmt::Display for NormalizationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NormalizationMode::Pooled => "pooled",
            NormalizationMode::TrainOnly => "train",
            NormalizationMode::None => "none",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSettings {
    pub grid: CvGrid,
    pub folds: usize,
    pub resamples: usize,
    pub seed: u64,
    pub gaussian: GaussianWeightParams,
    pub include_self: bool,
    pub normalization: NormalizationMode,
    /// Skip selection of `k` and use this value.
    pub fixed_k: Option<usize>,
    /// Skip selection of `r` and use this value.
    pub fixed_r: Option<usize>,
}

impl Default for ExperimentSettings {
    fn default() -> Self {
        Self {
            grid: CvGrid::default(),
            folds: 3,
            resamples: 10,
            seed: 42,
            gaussian: GaussianWeightParams::default(),
            include_self: false,
            normalization: NormalizationMode::Pooled,
            fixed_k: None,
            fixed_r: None,
        }
    }
}

impl ExperimentSettings {
    fn effective_grid(&self) -> Result<CvGrid> {
        let mut grid = self.grid.clone();
        if let Some(k) = self.fixed_k {
            grid = grid.with_k(vec![k])?;
        }
        if let Some(r) = self.fixed_r {
            grid = grid.with_r(vec![r])?;
        }
        Ok(grid)
    }
}

/// Independent sub-seed for one stage of the pipeline (splitmix64 finalizer).
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const CV_STREAM: u64 = 1;
const RESAMPLE_STREAM: u64 = 2;

/// Applies the normalization mode to a train/test pair.
pub fn normalize_pair(
    train: &LabeledDataset,
    test: &LabeledDataset,
    mode: NormalizationMode,
) -> Result<(LabeledDataset, LabeledDataset)> {
    let stats = match mode {
        NormalizationMode::None => return Ok((train.clone(), test.clone())),
        NormalizationMode::Pooled => compute_normalization(&[train, test])?,
        NormalizationMode::TrainOnly => compute_normalization(&[train])?,
    };
    Ok((apply_normalization(train, &stats)?, apply_normalization(test, &stats)?))
}

/// Normalizes, selects hyperparameters by cross-validation on the training
/// set, and evaluates every requested classifier on resampled test sets.
/// All classifiers see the same resampled test sets.
pub fn evaluate_dataset(
    name: &str,
    train: &LabeledDataset,
    test: &LabeledDataset,
    classifiers: &[ClassifierKind],
    settings: &ExperimentSettings,
) -> Result<Vec<EvalReport>> {
    check_compatible(train, test)?;
    let (train, test) = normalize_pair(train, test, settings.normalization)?;
    let grid = settings.effective_grid()?;
    let cv_seed = derive_seed(settings.seed, CV_STREAM);
    let resample_seed = derive_seed(settings.seed, RESAMPLE_STREAM);

    classifiers
        .iter()
        .map(|&kind| {
            let base = ClassifierConfig::new(kind)
                .with_gaussian(settings.gaussian)
                .with_include_self(settings.include_self);
            let selection = cross_validate(&train, &grid, &base, settings.folds, cv_seed)?;
            let config = selection.apply(&base);
            let mut report = bootstrap_resample_eval(&config, &train, &test, settings.resamples, resample_seed, name)?;
            report.seed = settings.seed;
            Ok(report)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TestSpec {
    File(PathBuf),
    /// Random split of the training file, seeded by the experiment seed.
    Split { train_count: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetSpec {
    pub name: String,
    pub train: PathBuf,
    pub test: TestSpec,
    pub csv: CsvOptions,
}

impl DatasetSpec {
    /// Loads the train/test pair, sharing one label registry.
    pub fn load(&self, seed: u64) -> Result<(LabeledDataset, LabeledDataset)> {
        let train = load_csv(&self.train, &self.csv)?;
        match &self.test {
            TestSpec::File(path) => {
                let test = load_csv_with_registry(path, &self.csv, train.registry().clone())?;
                let train = train.with_registry(test.registry().clone())?;
                Ok((train, test))
            }
            TestSpec::Split { train_count } => random_split(&train, *train_count, seed),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DatasetFailure {
    pub dataset: String,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct Comparison {
    pub reports: Vec<EvalReport>,
    pub failures: Vec<DatasetFailure>,
}

/// Runs the full protocol on every dataset. A dataset that fails to load or
/// evaluate is recorded in `failures` and the rest still run.
pub fn run_comparison(datasets: &[DatasetSpec], classifiers: &[ClassifierKind], settings: &ExperimentSettings) -> Comparison {
    let mut out = Comparison::default();
    if classifiers.is_empty() {
        return out;
    }
    for spec in datasets {
        let result = spec
            .load(settings.seed)
            .and_then(|(train, test)| evaluate_dataset(&spec.name, &train, &test, classifiers, settings));
        match result {
            Ok(reports) => out.reports.extend(reports),
            Err(e) => out.failures.push(DatasetFailure {
                dataset: spec.name.clone(),
                message: e.to_string(),
            }),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_parse() {
        assert_eq!("pooled".parse::<NormalizationMode>().unwrap(), NormalizationMode::Pooled);
        assert_eq!("train".parse::<NormalizationMode>().unwrap(), NormalizationMode::TrainOnly);
        assert!("zscore".parse::<NormalizationMode>().is_err());
    }

    #[test]
    fn seeds_are_distinct_per_stream() {
        assert_ne!(derive_seed(42, 1), derive_seed(42, 2));
        assert_eq!(derive_seed(7, 1), derive_seed(7, 1));
    }

    #[test]
    fn empty_classifier_list_gives_no_reports() {
        let spec = DatasetSpec {
            name: "missing".into(),
            train: "/no/such/file.csv".into(),
            test: TestSpec::Split { train_count: 1 },
            csv: CsvOptions::default(),
        };
        let out = run_comparison(std::slice::from_ref(&spec), &[], &ExperimentSettings::default());
        assert!(out.reports.is_empty() && out.failures.is_empty());

        let out = run_comparison(&[spec], &[ClassifierKind::Nnc], &ExperimentSettings::default());
        assert_eq!(out.failures.len(), 1);
        assert!(out.failures[0].message.contains("/no/such/file.csv"));
    }
}
