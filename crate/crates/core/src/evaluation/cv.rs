use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{ClassifierConfig, ClassifierKind};
use crate::bootstrap::{hamamoto_bootstrap, BootstrapConfig};
use crate::data::LabeledDataset;
use crate::error::{Error, Result};
use crate::neighbors::knn_search_batch;

/// Candidate hyperparameters. Both lists are kept sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CvGrid {
    k: Vec<usize>,
    r: Vec<usize>,
}

impl CvGrid {
    pub fn new(mut k: Vec<usize>, mut r: Vec<usize>) -> Result<Self> {
        for list in [&mut k, &mut r] {
            if list.is_empty() {
                return Err(Error::InvalidSetting("grid lists must be nonempty".into()));
            }
            if list.contains(&0) {
                return Err(Error::InvalidSetting("grid values must be at least 1".into()));
            }
            list.sort_unstable();
            list.dedup();
        }
        Ok(Self { k, r })
    }

    pub fn k(&self) -> &[usize] {
        &self.k
    }

    pub fn r(&self) -> &[usize] {
        &self.r
    }

    pub fn with_k(&self, k: Vec<usize>) -> Result<Self> {
        Self::new(k, self.r.clone())
    }

    pub fn with_r(&self, r: Vec<usize>) -> Result<Self> {
        Self::new(self.k.clone(), r)
    }
}

impl Default for CvGrid {
    /// Odd k from 1 to 31; r in {1, 2, 3, 5, 7, 10}.
    fn default() -> Self {
        Self {
            k: (1..=31).step_by(2).collect(),
            r: vec![1, 2, 3, 5, 7, 10],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateScore {
    pub k: usize,
    pub r: Option<usize>,
    pub mean_ca: f64,
}

/// Outcome of hyperparameter selection. `scores` is empty when nothing had to
/// be searched (NNC, or a single candidate).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Selection {
    pub k: usize,
    pub r: Option<usize>,
    pub scores: Vec<CandidateScore>,
}

impl Selection {
    pub fn mean_ca(&self) -> Option<f64> {
        self.scores
            .iter()
            .find(|s| s.k == self.k && s.r == self.r)
            .map(|s| s.mean_ca)
    }

    pub fn apply(&self, base: &ClassifierConfig) -> ClassifierConfig {
        let cfg = base.with_k(self.k);
        match self.r {
            Some(r) => cfg.with_r(r),
            None => cfg,
        }
    }
}

/// Seeded shuffle of `0..n` cut into `folds` contiguous near-equal parts.
/// Each fold's indices are returned sorted.
pub fn fold_assignment(n: usize, folds: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if folds < 2 {
        return Err(Error::InvalidSetting(format!("need at least 2 folds, got {folds}")));
    }
    if n < folds {
        return Err(Error::InvalidSetting(format!("{n} patterns cannot fill {folds} folds")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let (base, extra) = (n / folds, n % folds);
    let mut out = Vec::with_capacity(folds);
    let mut start = 0;
    for f in 0..folds {
        let len = base + usize::from(f < extra);
        let mut fold = order[start..start + len].to_vec();
        fold.sort_unstable();
        out.push(fold);
        start += len;
    }
    Ok(out)
}

/// Picks `k` (and `r` for the bootstrapped family) by k-fold cross-validation
/// on `train`. The candidate with the highest mean held-out accuracy wins;
/// ties go to the smaller `k`, then the smaller `r`. For the bootstrapped
/// family the bootstrap is rebuilt from each fold's training portion.
pub fn cross_validate(
    train: &LabeledDataset,
    grid: &CvGrid,
    base: &ClassifierConfig,
    folds: usize,
    seed: u64,
) -> Result<Selection> {
    let kind = base.kind;
    let r_values: Vec<Option<usize>> = if kind.uses_r() {
        grid.r.iter().copied().map(Some).collect()
    } else {
        vec![None]
    };
    if kind == ClassifierKind::Nnc {
        return Ok(Selection {
            k: 1,
            r: None,
            scores: Vec::new(),
        });
    }
    if grid.k.len() == 1 && r_values.len() == 1 {
        return Ok(Selection {
            k: grid.k[0],
            r: r_values[0],
            scores: Vec::new(),
        });
    }

    let parts = fold_assignment(train.len(), folds, seed)?;
    let k_max = *grid.k.last().expect("nonempty grid");
    let rule = base.rule();
    let classes = train.num_classes();
    // totals[r][k]: sum over folds of held-out accuracy
    let mut totals = vec![vec![0.0f64; grid.k.len()]; r_values.len()];

    for (f, held) in parts.iter().enumerate() {
        let rest: Vec<usize> = parts
            .iter()
            .enumerate()
            .filter(|&(g, _)| g != f)
            .flat_map(|(_, p)| p.iter().copied())
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect();
        let fold_train = train.subset(&rest)?;
        let fold_test = train.subset(held)?;

        for (ri, r) in r_values.iter().enumerate() {
            let reference = match r {
                Some(r) => hamamoto_bootstrap(&fold_train, &BootstrapConfig::new(*r, base.include_self)?)?,
                None => fold_train.clone(),
            };
            let lists = knn_search_batch(&reference, fold_test.patterns(), k_max)?;
            for (ki, &k) in grid.k.iter().enumerate() {
                let mut correct = 0usize;
                for (list, &actual) in lists.iter().zip(fold_test.labels()) {
                    if rule.decide(&list.truncated(k), classes)?.predicted == actual {
                        correct += 1;
                    }
                }
                totals[ri][ki] += 100.0 * correct as f64 / held.len() as f64;
            }
        }
    }

    let mut scores = Vec::with_capacity(grid.k.len() * r_values.len());
    for (ki, &k) in grid.k.iter().enumerate() {
        for (ri, &r) in r_values.iter().enumerate() {
            scores.push(CandidateScore {
                k,
                r,
                mean_ca: totals[ri][ki] / folds as f64,
            });
        }
    }
    // scores is ordered by (k, r); strict improvement keeps the earliest tie.
    let mut best = &scores[0];
    for s in &scores[1..] {
        if s.mean_ca > best.mean_ca {
            best = s;
        }
    }
    Ok(Selection {
        k: best.k,
        r: best.r,
        scores: scores.clone(),
    })
}
