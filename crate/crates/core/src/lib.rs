//! Nearest-neighbor pattern classification with Gaussian-weighted voting.
//!
//! The crate provides exact brute-force k-NN search and four decision rules
//! over the resulting neighbor lists:
//!
//! * NNC: class of the single nearest neighbor;
//! * k-NNC: majority vote among the k nearest;
//! * wk-NNC: votes weighted linearly between the first and k-th distance;
//! * Gwk-NNC: votes weighted by `exp(-h^2 / 2)`, which amounts to a Gaussian
//!   kernel density estimate restricted to the k nearest neighbors.
//!
//! It also builds Hamamoto-style bootstrapped training sets and implements the
//! benchmark protocol (z-score normalization, 3-fold selection of `k` and `r`,
//! accuracy over resampled test sets).
//!
//! ```
//! use gwknn::prelude::*;
//!
//! let train = LabeledDataset::from_rows(
//!     &[[0.0, 0.0], [0.2, 0.1], [3.0, 3.0], [3.1, 2.9], [2.8, 3.2]],
//!     &["a", "a", "b", "b", "b"],
//! )?;
//! let neighbors = knn_search(&train, &[0.4, 0.3], 3)?;
//! let decision = gwknn_classify(&neighbors, GaussianWeightParams::default(), train.num_classes())?;
//! assert_eq!(train.registry().name(decision.predicted), "a");
//! # Ok::<(), gwknn::Error>(())
//! ```

pub mod bootstrap;
pub mod classifiers;
pub mod data;
mod error;
pub mod evaluation;
pub mod neighbors;
mod parallel;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::bootstrap::{hamamoto_bootstrap, BootstrapConfig};
    pub use crate::classifiers::{
        estimate_posteriors, gaussian_weight, gwknn_classify, knnc_classify, nnc_classify, wknnc_classify, Decision,
        GaussianWeightParams, Rule,
    };
    pub use crate::data::{
        apply_normalization, compute_normalization, load_csv, random_split, ClassId, CsvOptions, LabelColumn,
        LabeledDataset, NormalizationStats, PatternSet,
    };
    pub use crate::evaluation::{
        bootstrap_resample_eval, classification_accuracy, cross_validate, evaluate_dataset, run_comparison,
        ClassifierConfig, ClassifierKind, CvGrid, EvalReport, ExperimentSettings, NormalizationMode,
    };
    pub use crate::neighbors::{euclidean_distance, knn_search, knn_search_batch, NeighborList};
    pub use crate::{Error, Result};
}
