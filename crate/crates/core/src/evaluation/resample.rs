use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{per_pattern_outcomes, ClassifierConfig};
use crate::data::LabeledDataset;
use crate::error::{Error, Result};

/// One cell of the comparison table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub classifier: String,
    pub dataset: String,
    pub selected_k: usize,
    pub selected_r: Option<usize>,
    /// Accuracy (percent) on each resampled test set.
    pub ca_values: Vec<f64>,
    pub mean_ca: f64,
    /// Sample standard deviation of `ca_values`.
    pub std_ca: f64,
    pub seed: u64,
}

/// Accuracy of each of `resamples` test sets drawn with replacement from the
/// per-pattern outcomes (same size as the original test set).
pub fn resample_accuracies(outcomes: &[bool], resamples: usize, seed: u64) -> Result<Vec<f64>> {
    if outcomes.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if resamples < 2 {
        return Err(Error::InvalidSetting(format!("need at least 2 resamples, got {resamples}")));
    }
    let n = outcomes.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..resamples)
        .map(|_| {
            let correct = (0..n)
                .filter(|_| outcomes[rng.gen_range(0..n as u64) as usize])
                .count();
            100.0 * correct as f64 / n as f64
        })
        .collect())
}

/// Mean and sample (n - 1) standard deviation.
pub fn mean_and_sample_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1.0)).sqrt())
}

/// Classifies each test pattern once, then scores `resamples` bootstrap
/// copies of the test set from those cached outcomes.
pub fn bootstrap_resample_eval(
    config: &ClassifierConfig,
    train: &LabeledDataset,
    test: &LabeledDataset,
    resamples: usize,
    seed: u64,
    dataset: &str,
) -> Result<EvalReport> {
    let outcomes = per_pattern_outcomes(config, train, test)?;
    let ca_values = resample_accuracies(&outcomes, resamples, seed)?;
    let (mean_ca, std_ca) = mean_and_sample_std(&ca_values);
    Ok(EvalReport {
        classifier: config.kind.name().to_owned(),
        dataset: dataset.to_owned(),
        selected_k: config.effective_k(),
        selected_r: config.kind.uses_r().then_some(config.r),
        ca_values,
        mean_ca,
        std_ca,
        seed,
    })
}
