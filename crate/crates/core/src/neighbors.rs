//! Exact brute-force k-nearest-neighbor search under the Euclidean metric.
//!
//! Candidates are ranked by `(squared distance, training index)`; the square
//! root is taken only for the returned entries. Ranking on squared distances
//! gives the same order as ranking on distances, and the index key makes ties
//! at the cut deterministic (smaller index wins).

use std::cmp::Ordering;

use serde::Serialize;

use crate::data::{ClassId, LabeledDataset, PatternSet};
use crate::error::{Error, Result};
use crate::parallel;

/// Squared Euclidean distance. Slices must have equal length.
#[inline]
pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 4];
    let (ca, cb) = (a.chunks_exact(4), b.chunks_exact(4));
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for l in 0..4 {
            let d = x[l] - y[l];
            acc[l] += d * d;
        }
    }
    let mut tail = 0.0;
    for (x, y) in ra.iter().zip(rb) {
        let d = x - y;
        tail += d * d;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

pub fn euclidean_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(squared_distance(a, b).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Neighbor {
    pub index: usize,
    pub distance: f64,
    pub label: ClassId,
}

/// The nearest training patterns of one query, closest first.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NeighborList {
    entries: Vec<Neighbor>,
    k: usize,
}

impl NeighborList {
    /// Validates ordering by `(distance, index)`, distinct indices and
    /// non-negative distances.
    pub fn new(entries: Vec<Neighbor>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidK);
        }
        if entries.len() > k {
            return Err(Error::MalformedNeighbors("more entries than k"));
        }
        if entries.iter().any(|e| !(e.distance.is_finite() && e.distance >= 0.0)) {
            return Err(Error::MalformedNeighbors("distances must be finite and non-negative"));
        }
        if entries
            .windows(2)
            .any(|w| rank(w[0].distance, w[0].index, w[1].distance, w[1].index) != Ordering::Less)
        {
            return Err(Error::MalformedNeighbors("entries must be sorted by (distance, index)"));
        }
        let mut idx: Vec<usize> = entries.iter().map(|e| e.index).collect();
        idx.sort_unstable();
        if idx.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::MalformedNeighbors("duplicate training index"));
        }
        Ok(Self { entries, k })
    }

    pub fn entries(&self) -> &[Neighbor] {
        &self.entries
    }

    /// Requested neighbor count; `len()` is `min(k, n)`.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn first(&self) -> Option<&Neighbor> {
        self.entries.first()
    }

    pub fn last(&self) -> Option<&Neighbor> {
        self.entries.last()
    }

    /// The list a search with a smaller `k` would have returned.
    pub fn truncated(&self, k: usize) -> NeighborList {
        assert!(k >= 1, "k must be at least 1");
        NeighborList {
            entries: self.entries[..k.min(self.entries.len())].to_vec(),
            k,
        }
    }
}

#[inline]
fn rank(d1: f64, i1: usize, d2: f64, i2: usize) -> Ordering {
    d1.total_cmp(&d2).then(i1.cmp(&i2))
}

/// Keeps the `k` best `(squared distance, index)` pairs seen so far, sorted.
pub(crate) struct TopK {
    k: usize,
    best: Vec<(f64, usize)>,
}

impl TopK {
    pub(crate) fn new(k: usize) -> Self {
        Self {
            k,
            best: Vec::with_capacity(k + 1),
        }
    }

    #[inline]
    pub(crate) fn offer(&mut self, d2: f64, index: usize) {
        if self.best.len() == self.k {
            let &(wd, wi) = self.best.last().expect("k >= 1");
            if rank(d2, index, wd, wi) != Ordering::Less {
                return;
            }
        }
        let pos = self
            .best
            .partition_point(|&(d, i)| rank(d, i, d2, index) == Ordering::Less);
        self.best.insert(pos, (d2, index));
        self.best.truncate(self.k);
    }

    pub(crate) fn into_sorted(self) -> Vec<(f64, usize)> {
        self.best
    }
}

/// The `min(k, n)` training patterns closest to `query`.
pub fn knn_search(train: &LabeledDataset, query: &[f64], k: usize) -> Result<NeighborList> {
    if k == 0 {
        return Err(Error::InvalidK);
    }
    if query.len() != train.dim() {
        return Err(Error::DimensionMismatch {
            expected: train.dim(),
            found: query.len(),
        });
    }
    Ok(search_unchecked(train, query, k))
}

fn search_unchecked(train: &LabeledDataset, query: &[f64], k: usize) -> NeighborList {
    let mut top = TopK::new(k);
    for (i, row) in train.patterns().rows().enumerate() {
        top.offer(squared_distance(row, query), i);
    }
    let entries = top
        .into_sorted()
        .into_iter()
        .map(|(d2, index)| Neighbor {
            index,
            distance: d2.sqrt(),
            label: train.label(index),
        })
        .collect();
    NeighborList { entries, k }
}

/// Searches every query; output is in query order. Runs in parallel when the
/// `parallel` feature is enabled.
pub fn knn_search_batch(train: &LabeledDataset, queries: &PatternSet, k: usize) -> Result<Vec<NeighborList>> {
    if k == 0 {
        return Err(Error::InvalidK);
    }
    if queries.dim() != train.dim() {
        return Err(Error::DimensionMismatch {
            expected: train.dim(),
            found: queries.dim(),
        });
    }
    Ok(parallel::map_indices(queries.len(), |q| {
        search_unchecked(train, queries.row(q), k)
    }))
}
