//! Accuracy measurement and the benchmark protocol: 0-1 loss, configured
//! classifiers, k-fold hyperparameter selection, resampled test sets and
//! comparison reports.

mod cv;
mod pipeline;
mod report;
mod resample;

use std::borrow::Cow;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use cv::{cross_validate, fold_assignment, CandidateScore, CvGrid, Selection};
pub use pipeline::{
    derive_seed, evaluate_dataset, normalize_pair, run_comparison, Comparison, DatasetFailure, DatasetSpec,
    ExperimentSettings, NormalizationMode, TestSpec,
};
pub use report::{render_table, reports_to_json};
pub use resample::{bootstrap_resample_eval, mean_and_sample_std, resample_accuracies, EvalReport};

use crate::bootstrap::{hamamoto_bootstrap, BootstrapConfig};
use crate::classifiers::{Decision, GaussianWeightParams, Rule};
use crate::data::{ClassId, LabeledDataset, PatternSet};
use crate::error::{Error, Result};
use crate::neighbors::knn_search;
use crate::parallel;

/// The five compared classifier families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ClassifierKind {
    Nnc,
    Knnc,
    Wknnc,
    KnncHbs,
    Gwknnc,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 5] = [
        ClassifierKind::Nnc,
        ClassifierKind::Knnc,
        ClassifierKind::Wknnc,
        ClassifierKind::KnncHbs,
        ClassifierKind::Gwknnc,
    ];

    /// Display name used in reports.
    pub fn name(self) -> &'static str {
        match self {
            ClassifierKind::Nnc => "NNC",
            ClassifierKind::Knnc => "k-NNC",
            ClassifierKind::Wknnc => "wk-NNC",
            ClassifierKind::KnncHbs => "k-NNC(HBS)",
            ClassifierKind::Gwknnc => "Gwk-NNC",
        }
    }

    /// Command-line token.
    pub fn token(self) -> &'static str {
        match self {
            ClassifierKind::Nnc => "nnc",
            ClassifierKind::Knnc => "knnc",
            ClassifierKind::Wknnc => "wknnc",
            ClassifierKind::KnncHbs => "knnc-hbs",
            ClassifierKind::Gwknnc => "gwknnc",
        }
    }

    pub fn uses_k(self) -> bool {
        self != ClassifierKind::Nnc
    }

    pub fn uses_r(self) -> bool {
        self == ClassifierKind::KnncHbs
    }
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClassifierKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ClassifierKind::ALL
            .into_iter()
            .find(|k| k.token().eq_ignore_ascii_case(s) || k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidSetting(format!("unknown classifier {s:?}")))
    }
}

/// A classifier family with concrete hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifierConfig {
    pub kind: ClassifierKind,
    pub k: usize,
    pub r: usize,
    pub gaussian: GaussianWeightParams,
    pub include_self: bool,
}

impl ClassifierConfig {
    pub fn new(kind: ClassifierKind) -> Self {
        Self {
            kind,
            k: 1,
            r: 1,
            gaussian: GaussianWeightParams::default(),
            include_self: false,
        }
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = k;
        self
    }

    pub fn with_r(mut self, r: usize) -> Self {
        self.r = r;
        self
    }

    pub fn with_gaussian(mut self, gaussian: GaussianWeightParams) -> Self {
        self.gaussian = gaussian;
        self
    }

    pub fn with_include_self(mut self, include_self: bool) -> Self {
        self.include_self = include_self;
        self
    }

    /// Neighbor count actually searched (NNC always uses one).
    pub fn effective_k(&self) -> usize {
        if self.kind.uses_k() {
            self.k
        } else {
            1
        }
    }

    pub fn rule(&self) -> Rule {
        match self.kind {
            ClassifierKind::Nnc => Rule::Nnc,
            ClassifierKind::Knnc | ClassifierKind::KnncHbs => Rule::Knnc,
            ClassifierKind::Wknnc => Rule::Wknnc,
            ClassifierKind::Gwknnc => Rule::Gwknnc(self.gaussian),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidK);
        }
        if self.r == 0 {
            return Err(Error::InvalidR);
        }
        Ok(())
    }

    pub fn fit<'a>(&self, train: &'a LabeledDataset) -> Result<FittedClassifier<'a>> {
        FittedClassifier::fit(*self, train)
    }
}

/// A configured classifier bound to its (possibly bootstrapped) training set.
#[derive(Debug, Clone)]
pub struct FittedClassifier<'a> {
    config: ClassifierConfig,
    train: Cow<'a, LabeledDataset>,
}

impl<'a> FittedClassifier<'a> {
    pub fn fit(config: ClassifierConfig, train: &'a LabeledDataset) -> Result<Self> {
        config.validate()?;
        let train = if config.kind.uses_r() {
            let cfg = BootstrapConfig::new(config.r, config.include_self)?;
            Cow::Owned(hamamoto_bootstrap(train, &cfg)?)
        } else {
            Cow::Borrowed(train)
        };
        Ok(Self { config, train })
    }

    pub fn config(&self) -> &ClassifierConfig {
        &self.config
    }

    /// The reference set searched at classification time.
    pub fn reference(&self) -> &LabeledDataset {
        &self.train
    }

    pub fn classify(&self, query: &[f64]) -> Result<Decision> {
        let neighbors = knn_search(&self.train, query, self.config.effective_k())?;
        self.config.rule().decide(&neighbors, self.train.num_classes())
    }

    /// Decisions for every query, in query order.
    pub fn classify_all(&self, queries: &PatternSet) -> Result<Vec<Decision>> {
        if queries.dim() != self.train.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.train.dim(),
                found: queries.dim(),
            });
        }
        parallel::try_map_indices(queries.len(), |q| self.classify(queries.row(q)))
    }
}

/// 0 for a correct prediction, 1 otherwise.
pub fn zero_one_loss(predicted: ClassId, actual: ClassId) -> u8 {
    u8::from(predicted != actual)
}

/// Train and test must share dimensionality and label registry.
pub fn check_compatible(train: &LabeledDataset, test: &LabeledDataset) -> Result<()> {
    if train.dim() != test.dim() {
        return Err(Error::DimensionMismatch {
            expected: train.dim(),
            found: test.dim(),
        });
    }
    if train.registry() != test.registry() {
        return Err(Error::RegistryMismatch);
    }
    Ok(())
}

/// Per test pattern, whether it was classified correctly (test order).
pub fn per_pattern_outcomes(
    config: &ClassifierConfig,
    train: &LabeledDataset,
    test: &LabeledDataset,
) -> Result<Vec<bool>> {
    check_compatible(train, test)?;
    let fitted = config.fit(train)?;
    let decisions = fitted.classify_all(test.patterns())?;
    Ok(decisions
        .iter()
        .zip(test.labels())
        .map(|(d, &actual)| zero_one_loss(d.predicted, actual) == 0)
        .collect())
}

/// Percentage of `test` classified correctly.
pub fn classification_accuracy(config: &ClassifierConfig, train: &LabeledDataset, test: &LabeledDataset) -> Result<f64> {
    Ok(accuracy_of(&per_pattern_outcomes(config, train, test)?))
}

pub(crate) fn accuracy_of(outcomes: &[bool]) -> f64 {
    let correct = outcomes.iter().filter(|&&c| c).count();
    100.0 * correct as f64 / outcomes.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn clusters() -> (LabeledDataset, LabeledDataset) {
        let train = LabeledDataset::from_rows(&[[-2.0], [-2.1], [2.0], [2.1]], &["A", "A", "B", "B"]).unwrap();
        let test = LabeledDataset::from_rows(&[[-1.9], [1.9]], &["A", "B"]).unwrap();
        (train, test)
    }

    #[test]
    fn loss_values() {
        assert_eq!(zero_one_loss(ClassId(0), ClassId(0)), 0);
        assert_eq!(zero_one_loss(ClassId(0), ClassId(1)), 1);
    }

    #[test]
    fn accuracy_is_complement_of_mean_loss() {
        let (train, test) = clusters();
        let cfg = ClassifierConfig::new(ClassifierKind::Knnc).with_k(3);
        let outcomes = per_pattern_outcomes(&cfg, &train, &test).unwrap();
        let mean_loss = outcomes.iter().map(|&c| f64::from(u8::from(!c))).sum::<f64>() / outcomes.len() as f64;
        assert_eq!(classification_accuracy(&cfg, &train, &test).unwrap(), 100.0 * (1.0 - mean_loss));
    }

    #[test]
    fn self_match_gives_full_accuracy() {
        let ds = LabeledDataset::from_rows(&[[0.0, 1.0], [1.0, 0.0], [3.0, 3.0], [0.5, 0.5]], &["a", "b", "a", "c"])
            .unwrap();
        let cfg = ClassifierConfig::new(ClassifierKind::Nnc);
        assert_eq!(classification_accuracy(&cfg, &ds, &ds).unwrap(), 100.0);
    }

    #[test]
    fn separable_clusters() {
        let (train, test) = clusters();
        for kind in ClassifierKind::ALL {
            let cfg = ClassifierConfig::new(kind).with_include_self(true);
            assert_eq!(classification_accuracy(&cfg, &train, &test).unwrap(), 100.0, "{kind}");
        }
    }

    #[test]
    fn all_wrong_gives_zero() {
        let (train, _) = clusters();
        let mut reg = train.registry().clone();
        let labels = vec![reg.intern("B"), reg.intern("A")];
        let test = LabeledDataset::new(PatternSet::from_rows(&[[-1.9], [1.9]]).unwrap(), labels, reg).unwrap();
        let cfg = ClassifierConfig::new(ClassifierKind::Nnc);
        assert_eq!(classification_accuracy(&cfg, &train, &test).unwrap(), 0.0);
    }

    #[test]
    fn incompatible_sets_are_rejected() {
        let (train, _) = clusters();
        let other = LabeledDataset::from_rows(&[[0.0]], &["Z"]).unwrap();
        let cfg = ClassifierConfig::new(ClassifierKind::Nnc);
        assert!(matches!(
            classification_accuracy(&cfg, &train, &other),
            Err(Error::RegistryMismatch)
        ));
        let wide = LabeledDataset::from_rows(&[[0.0, 1.0]], &["A"]).unwrap();
        assert!(matches!(
            classification_accuracy(&cfg, &train, &wide),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn kind_tokens_round_trip() {
        for kind in ClassifierKind::ALL {
            assert_eq!(kind.token().parse::<ClassifierKind>().unwrap(), kind);
            assert_eq!(kind.name().parse::<ClassifierKind>().unwrap(), kind);
        }
        assert!("svm".parse::<ClassifierKind>().is_err());
    }
}
