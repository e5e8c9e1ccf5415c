//! Decision rules over a [`NeighborList`]: NNC, k-NNC (majority vote),
//! wk-NNC (Dudani's linear distance weights) and Gwk-NNC (Gaussian weights).
//!
//! Every rule produces per-class scores, picks the argmax and breaks ties by
//! the smallest class id, flagging that a tie occurred. Classes with no
//! neighbor in the list score 0.

use std::f64::consts::PI;

use serde::Serialize;

use crate::data::ClassId;
use crate::error::{Error, Result};
use crate::neighbors::NeighborList;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Decision {
    pub predicted: ClassId,
    pub scores: Vec<f64>,
    /// The maximum score was shared by more than one class.
    pub tie: bool,
}

impl Decision {
    fn from_scores(scores: Vec<f64>) -> Self {
        let (predicted, tie) = argmax(&scores);
        Decision {
            predicted,
            scores,
            tie,
        }
    }
}

/// Index of the largest score (smallest index among equals) and whether the
/// maximum was attained more than once.
pub fn argmax(scores: &[f64]) -> (ClassId, bool) {
    assert!(!scores.is_empty(), "argmax of an empty score vector");
    let mut best = 0;
    let mut tie = false;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
            tie = false;
        } else if s == scores[best] {
            tie = true;
        }
    }
    (ClassId::from(best), tie)
}

/// All class ids attaining the maximum score.
pub fn argmax_set(scores: &[f64]) -> Vec<ClassId> {
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    scores
        .iter()
        .enumerate()
        .filter(|(_, &s)| s == max)
        .map(|(i, _)| ClassId::from(i))
        .collect()
}

/// Kernel width of the Gaussian neighbor weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianWeightParams {
    sigma: f64,
}

impl GaussianWeightParams {
    pub fn new(sigma: f64) -> Result<Self> {
        if sigma > 0.0 && sigma.is_finite() {
            Ok(Self { sigma })
        } else {
            Err(Error::InvalidSigma(sigma))
        }
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

impl Default for GaussianWeightParams {
    /// Unit width, matching standardized features.
    fn default() -> Self {
        Self { sigma: 1.0 }
    }
}

fn check(neighbors: &NeighborList, classes: usize) -> Result<()> {
    if neighbors.is_empty() {
        return Err(Error::EmptyNeighbors);
    }
    if let Some(e) = neighbors.entries().iter().find(|e| e.label.index() >= classes) {
        return Err(Error::LabelOutOfRange {
            id: e.label.index(),
            classes,
        });
    }
    Ok(())
}

fn weighted_scores(neighbors: &NeighborList, classes: usize, weight: impl Fn(usize) -> f64) -> Vec<f64> {
    let mut scores = vec![0.0; classes];
    for (i, e) in neighbors.entries().iter().enumerate() {
        scores[e.label.index()] += weight(i);
    }
    scores
}

/// Class of the nearest neighbor.
pub fn nnc_classify(neighbors: &NeighborList, classes: usize) -> Result<Decision> {
    check(neighbors, classes)?;
    let mut scores = vec![0.0; classes];
    scores[neighbors.entries()[0].label.index()] = 1.0;
    Ok(Decision {
        predicted: neighbors.entries()[0].label,
        scores,
        tie: false,
    })
}

/// Majority vote; `scores[i]` is the neighbor count `k_i` of class `i`.
pub fn knnc_classify(neighbors: &NeighborList, classes: usize) -> Result<Decision> {
    check(neighbors, classes)?;
    Ok(Decision::from_scores(weighted_scores(neighbors, classes, |_| 1.0)))
}

/// Dudani weights `(h_k - h_i) / (h_k - h_1)`; every weight is 1 when all
/// neighbors are equidistant (including a single neighbor).
pub fn wknnc_weights(neighbors: &NeighborList) -> Vec<f64> {
    let entries = neighbors.entries();
    let (Some(first), Some(last)) = (entries.first(), entries.last()) else {
        return Vec::new();
    };
    let (h1, hk) = (first.distance, last.distance);
    if hk > h1 {
        entries.iter().map(|e| (hk - e.distance) / (hk - h1)).collect()
    } else {
        vec![1.0; entries.len()]
    }
}

pub fn wknnc_classify(neighbors: &NeighborList, classes: usize) -> Result<Decision> {
    check(neighbors, classes)?;
    let w = wknnc_weights(neighbors);
    Ok(Decision::from_scores(weighted_scores(neighbors, classes, |i| w[i])))
}

/// `exp(-h^2 / (2 sigma^2))`.
#[inline]
pub fn gaussian_weight(h: f64, params: GaussianWeightParams) -> f64 {
    let s = params.sigma;
    (-(h * h) / (2.0 * s * s)).exp()
}

/// Cumulative Gaussian weight `W_i` of every class.
pub fn cumulative_weights(neighbors: &NeighborList, params: GaussianWeightParams, classes: usize) -> Vec<f64> {
    let e = neighbors.entries();
    weighted_scores(neighbors, classes, |i| gaussian_weight(e[i].distance, params))
}

/// Gaussian-weighted k-NN: the class with the largest `W_i` wins.
///
/// When every weight underflows to zero (all neighbors tens of kernel widths
/// away), scores are recomputed relative to the nearest neighbor, i.e. each
/// `W_i` is multiplied by the common factor `exp(h_1^2 / (2 sigma^2))`.
pub fn gwknn_classify(neighbors: &NeighborList, params: GaussianWeightParams, classes: usize) -> Result<Decision> {
    check(neighbors, classes)?;
    let mut scores = cumulative_weights(neighbors, params, classes);
    if scores.iter().all(|&s| s == 0.0) {
        let e = neighbors.entries();
        let h1 = e[0].distance;
        let s2 = 2.0 * params.sigma * params.sigma;
        scores = weighted_scores(neighbors, classes, |i| {
            let h = e[i].distance;
            (-((h - h1) * (h + h1)) / s2).exp()
        });
    }
    Ok(Decision::from_scores(scores))
}

/// `(2 pi)^{d/2} sigma^d`, the Gaussian kernel normalizer in `d` dimensions.
pub fn gaussian_normalizer(d: usize, params: GaussianWeightParams) -> f64 {
    (2.0 * PI).powf(d as f64 / 2.0) * params.sigma.powi(d as i32)
}

/// Class-conditional densities estimated from the neighbors of each class:
/// `W_i / (k_i (2 pi)^{d/2} sigma^d)`, or 0 for classes with `k_i = 0`.
pub fn class_conditional_densities(
    neighbors: &NeighborList,
    params: GaussianWeightParams,
    d: usize,
    classes: usize,
) -> Result<Vec<f64>> {
    check(neighbors, classes)?;
    let w = cumulative_weights(neighbors, params, classes);
    let counts = weighted_scores(neighbors, classes, |_| 1.0);
    let norm = gaussian_normalizer(d, params);
    Ok(w
        .iter()
        .zip(&counts)
        .map(|(&wi, &ki)| if ki > 0.0 { wi / (ki * norm) } else { 0.0 })
        .collect())
}

/// Posterior up to the class-independent evidence factor: density times the
/// neighbor prior `k_i / k`. The `k_i` cancel, leaving `W_i / (k (2 pi)^{d/2} sigma^d)`,
/// which is what is computed.
pub fn estimate_posteriors(
    neighbors: &NeighborList,
    params: GaussianWeightParams,
    k: usize,
    d: usize,
    classes: usize,
) -> Result<Vec<f64>> {
    check(neighbors, classes)?;
    if k == 0 {
        return Err(Error::InvalidK);
    }
    let scale = 1.0 / (k as f64 * gaussian_normalizer(d, params));
    Ok(cumulative_weights(neighbors, params, classes)
        .into_iter()
        .map(|w| w * scale)
        .collect())
}

/// A decision rule with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rule {
    Nnc,
    Knnc,
    Wknnc,
    Gwknnc(GaussianWeightParams),
}

impl Rule {
    pub fn decide(&self, neighbors: &NeighborList, classes: usize) -> Result<Decision> {
        match self {
            Rule::Nnc => nnc_classify(neighbors, classes),
            Rule::Knnc => knnc_classify(neighbors, classes),
            Rule::Wknnc => wknnc_classify(neighbors, classes),
            Rule::Gwknnc(p) => gwknn_classify(neighbors, *p, classes),
        }
    }
}
