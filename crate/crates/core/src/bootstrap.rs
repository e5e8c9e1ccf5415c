//! Hamamoto-style bootstrapped training sets: every training pattern is
//! replaced by the equal-weight mean of its `r` nearest neighbors within its
//! own class. All patterns are bootstrapped; labels and order are kept.

use serde::{Deserialize, Serialize};

use crate::data::{LabeledDataset, PatternSet};
use crate::error::{Error, Result};
use crate::neighbors::{squared_distance, TopK};
use crate::parallel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    r: usize,
    include_self: bool,
}

impl BootstrapConfig {
    pub fn new(r: usize, include_self: bool) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidR);
        }
        Ok(Self { r, include_self })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// Whether a pattern counts among its own neighbors (at distance 0).
    pub fn include_self(&self) -> bool {
        self.include_self
    }
}

pub fn hamamoto_bootstrap(train: &LabeledDataset, cfg: &BootstrapConfig) -> Result<LabeledDataset> {
    let members = train.class_members();
    if !cfg.include_self {
        if let Some(c) = members.iter().position(|m| m.len() == 1) {
            return Err(Error::SingletonClass {
                class: train.registry().names()[c].clone(),
            });
        }
    }

    let dim = train.dim();
    let rows = parallel::map_indices(train.len(), |i| {
        let query = train.pattern(i);
        let class = &members[train.label(i).index()];
        let mut top = TopK::new(cfg.r);
        for &j in class {
            if j != i || cfg.include_self {
                top.offer(squared_distance(train.pattern(j), query), j);
            }
        }
        let mut chosen: Vec<usize> = top.into_sorted().into_iter().map(|(_, j)| j).collect();
        // Summing in index order makes r = n_j reproduce the class centroid exactly.
        chosen.sort_unstable();
        mean_of(train, &chosen, dim)
    });

    let values = rows.into_iter().flatten().collect();
    train.with_patterns(PatternSet::new(dim, values)?)
}

fn mean_of(ds: &LabeledDataset, rows: &[usize], dim: usize) -> Vec<f64> {
    let mut sum = vec![0.0; dim];
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for &j in rows {
        for (f, &v) in ds.pattern(j).iter().enumerate() {
            sum[f] += v;
            lo[f] = lo[f].min(v);
            hi[f] = hi[f].max(v);
        }
    }
    let n = rows.len() as f64;
    // Clamp guards against the mean landing one ulp outside the neighbors' range.
    (0..dim).map(|f| (sum[f] / n).clamp(lo[f], hi[f])).collect()
}
