//! Labeled datasets, CSV ingestion, joint z-score normalization and seeded
//! random splitting.

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense class index into a [`LabelRegistry`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ClassId(pub u32);

impl ClassId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for ClassId {
    fn from(i: usize) -> Self {
        ClassId(u32::try_from(i).expect("class index fits in u32"))
    }
}

impl fmt::Display for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Maps label text to dense ids `0..c` in first-appearance order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabelRegistry {
    names: Vec<String>,
    ids: HashMap<String, ClassId>,
}

impl LabelRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_names<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut reg = Self::new();
        for name in names {
            reg.intern(&name.into());
        }
        reg
    }

    /// Returns the id of `name`, registering it if unseen.
    pub fn intern(&mut self, name: &str) -> ClassId {
        if let Some(&id) = self.ids.get(name) {
            return id;
        }
        let id = ClassId::from(self.names.len());
        self.names.push(name.to_owned());
        self.ids.insert(name.to_owned(), id);
        id
    }

    pub fn id(&self, name: &str) -> Option<ClassId> {
        self.ids.get(name).copied()
    }

    pub fn name(&self, id: ClassId) -> &str {
        &self.names[id.index()]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// True when every label of `self` has the same id in `other`.
    pub fn is_prefix_of(&self, other: &LabelRegistry) -> bool {
        self.names.len() <= other.names.len()
            && self.names.iter().zip(&other.names).all(|(a, b)| a == b)
    }
}

/// Row-major matrix of `len()` patterns with `dim()` finite features each.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternSet {
    dim: usize,
    values: Vec<f64>,
}

impl PatternSet {
    pub fn new(dim: usize, values: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidSetting("patterns need at least one feature".into()));
        }
        if !values.len().is_multiple_of(dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: values.len() % dim,
            });
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / dim,
                feature: pos % dim,
            });
        }
        Ok(Self { dim, values })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.first().map(|r| r.as_ref().len()).ok_or(Error::EmptyDataset)?;
        let mut values = Vec::with_capacity(rows.len() * dim);
        for row in rows {
            let row = row.as_ref();
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        Self::new(dim, values)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.values.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, f64> {
        self.values.chunks_exact(self.dim)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Patterns paired with class labels that share one registry.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    patterns: PatternSet,
    labels: Vec<ClassId>,
    registry: LabelRegistry,
}

impl LabeledDataset {
    pub fn new(patterns: PatternSet, labels: Vec<ClassId>, registry: LabelRegistry) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if labels.len() != patterns.len() {
            return Err(Error::InvalidSetting(format!(
                "{} patterns but {} labels",
                patterns.len(),
                labels.len()
            )));
        }
        if let Some(bad) = labels.iter().find(|l| l.index() >= registry.len()) {
            return Err(Error::LabelOutOfRange {
                id: bad.index(),
                classes: registry.len(),
            });
        }
        Ok(Self {
            patterns,
            labels,
            registry,
        })
    }

    /// Builds a dataset from rows and label text, interning labels in order.
    pub fn from_rows<R: AsRef<[f64]>, S: AsRef<str>>(rows: &[R], labels: &[S]) -> Result<Self> {
        let mut registry = LabelRegistry::new();
        let ids = labels.iter().map(|l| registry.intern(l.as_ref())).collect();
        Self::new(PatternSet::from_rows(rows)?, ids, registry)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.patterns.dim()
    }

    pub fn num_classes(&self) -> usize {
        self.registry.len()
    }

    pub fn patterns(&self) -> &PatternSet {
        &self.patterns
    }

    pub fn pattern(&self, i: usize) -> &[f64] {
        self.patterns.row(i)
    }

    pub fn label(&self, i: usize) -> ClassId {
        self.labels[i]
    }

    pub fn labels(&self) -> &[ClassId] {
        &self.labels
    }

    pub fn registry(&self) -> &LabelRegistry {
        &self.registry
    }

    /// Per-class pattern counts `n_j`, indexed by class id.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.num_classes()];
        for l in &self.labels {
            counts[l.index()] += 1;
        }
        counts
    }

    /// Indices of the patterns of each class, in dataset order.
    pub fn class_members(&self) -> Vec<Vec<usize>> {
        let mut members = vec![Vec::new(); self.num_classes()];
        for (i, l) in self.labels.iter().enumerate() {
            members[l.index()].push(i);
        }
        members
    }

    /// The patterns at `indices`, in the given order, with the same registry.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let dim = self.dim();
        let mut values = Vec::with_capacity(indices.len() * dim);
        for &i in indices {
            values.extend_from_slice(self.pattern(i));
        }
        let labels = indices.iter().map(|&i| self.labels[i]).collect();
        Self::new(PatternSet::new(dim, values)?, labels, self.registry.clone())
    }

    /// Replaces the registry with a superset that keeps every existing id.
    pub fn with_registry(mut self, registry: LabelRegistry) -> Result<Self> {
        if !self.registry.is_prefix_of(&registry) {
            return Err(Error::RegistryMismatch);
        }
        self.registry = registry;
        Ok(self)
    }

    /// Same labels and registry, new feature values.
    pub fn with_patterns(&self, patterns: PatternSet) -> Result<Self> {
        if patterns.len() != self.len() {
            return Err(Error::InvalidSetting(format!(
                "expected {} patterns, got {}",
                self.len(),
                patterns.len()
            )));
        }
        Self::new(patterns, self.labels.clone(), self.registry.clone())
    }
}

/// Which column of a CSV file holds the class label.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub enum LabelColumn {
    #[default]
    Last,
    /// Zero-based column index.
    Index(usize),
    /// Header name; requires a header row.
    Name(String),
}

impl FromStr for LabelColumn {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(if s.eq_ignore_ascii_case("last") {
            LabelColumn::Last
        } else if let Ok(i) = s.parse::<usize>() {
            LabelColumn::Index(i)
        } else {
            LabelColumn::Name(s.to_owned())
        })
    }
}

impl fmt::Display for LabelColumn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabelColumn::Last => f.write_str("last"),
            LabelColumn::Index(i) => write!(f, "{i}"),
            LabelColumn::Name(n) => f.write_str(n),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvOptions {
    pub delimiter: u8,
    pub has_header: bool,
    pub label_column: LabelColumn,
}

impl Default for CsvOptions {
    fn default() -> Self {
        Self {
            delimiter: b',',
            has_header: false,
            label_column: LabelColumn::Last,
        }
    }
}

pub fn load_csv(path: impl AsRef<Path>, opts: &CsvOptions) -> Result<LabeledDataset> {
    load_csv_with_registry(path, opts, LabelRegistry::new())
}

/// Loads a CSV file, reusing (and extending) an existing label registry so
/// that a test file maps labels onto the ids of its training file.
pub fn load_csv_with_registry(
    path: impl AsRef<Path>,
    opts: &CsvOptions,
    mut registry: LabelRegistry,
) -> Result<LabeledDataset> {
    let path = path.as_ref();
    let (rows, label_names) = read_rows(path, opts, Some(&opts.label_column))?;
    let label_names = label_names.expect("label column requested");
    let labels = label_names.iter().map(|n| registry.intern(n)).collect();
    let dim = rows.dim();
    LabeledDataset::new(rows, labels, registry).map_err(|e| match e {
        Error::EmptyDataset => Error::EmptyFile {
            path: path.to_owned(),
        },
        Error::InvalidSetting(_) if dim == 0 => Error::EmptyFile {
            path: path.to_owned(),
        },
        other => other,
    })
}

/// Loads unlabeled query patterns. When `drop_column` is given, that column
/// is ignored (for query files that still carry a label).
pub fn load_patterns_csv(
    path: impl AsRef<Path>,
    delimiter: u8,
    has_header: bool,
    drop_column: Option<&LabelColumn>,
) -> Result<PatternSet> {
    let opts = CsvOptions {
        delimiter,
        has_header,
        label_column: LabelColumn::Last,
    };
    read_rows(path.as_ref(), &opts, drop_column).map(|(rows, _)| rows)
}

fn read_rows(
    path: &Path,
    opts: &CsvOptions,
    label_column: Option<&LabelColumn>,
) -> Result<(PatternSet, Option<Vec<String>>)> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(opts.delimiter)
        .has_headers(opts.has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let csv_err = |source| Error::Csv {
        path: path.to_owned(),
        source,
    };

    let named_label = match label_column {
        Some(LabelColumn::Name(name)) => {
            let missing = || Error::MissingLabelColumn {
                path: path.to_owned(),
                column: name.clone(),
            };
            if !opts.has_header {
                return Err(missing());
            }
            let headers = reader.headers().map_err(csv_err)?;
            Some(headers.iter().position(|h| h == name).ok_or_else(missing)?)
        }
        _ => None,
    };

    let mut values = Vec::new();
    let mut labels = label_column.map(|_| Vec::new());
    let mut arity = None;
    let mut label_idx = None;
    for (n, record) in reader.records().enumerate() {
        let record = record.map_err(csv_err)?;
        let row = record.position().map_or(n as u64 + 1, |p| p.line());
        let expected = *arity.get_or_insert(record.len());
        if record.len() != expected {
            return Err(Error::RaggedRow {
                path: path.to_owned(),
                row,
                expected,
                found: record.len(),
            });
        }
        let label_at = match label_idx {
            Some(i) => i,
            None => {
                let i = match label_column {
                    None => None,
                    Some(LabelColumn::Last) => Some(expected.saturating_sub(1)),
                    Some(LabelColumn::Index(i)) => Some(*i),
                    Some(LabelColumn::Name(_)) => named_label,
                };
                if let Some(i) = i {
                    if i >= expected {
                        return Err(Error::MissingLabelColumn {
                            path: path.to_owned(),
                            column: label_column.map(|c| c.to_string()).unwrap_or_default(),
                        });
                    }
                }
                *label_idx.insert(i.unwrap_or(usize::MAX))
            }
        };
        for (col, cell) in record.iter().enumerate() {
            if col == label_at {
                if let Some(labels) = labels.as_mut() {
                    labels.push(cell.to_owned());
                }
                continue;
            }
            match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => values.push(v),
                _ => {
                    return Err(Error::BadCell {
                        path: path.to_owned(),
                        row,
                        column: col + 1,
                        value: cell.to_owned(),
                    })
                }
            }
        }
    }

    let arity = arity.ok_or_else(|| Error::EmptyFile {
        path: path.to_owned(),
    })?;
    let dim = if label_idx.is_some_and(|i| i < arity) {
        arity - 1
    } else {
        arity
    };
    if dim == 0 {
        return Err(Error::EmptyFile {
            path: path.to_owned(),
        });
    }
    Ok((PatternSet::new(dim, values)?, labels))
}

/// Writes `ds` as CSV with the label in the last column. Values use the
/// shortest representation that parses back to the same `f64`.
pub fn write_csv(ds: &LabeledDataset, path: impl AsRef<Path>, delimiter: u8, header: bool) -> Result<()> {
    let path = path.as_ref();
    let io_err = |source| Error::Io {
        path: path.to_owned(),
        source,
    };
    let mut out = File::create(path).map_err(io_err)?;
    out.write_all(csv_string(ds, delimiter, header).as_bytes()).map_err(io_err)
}

pub fn csv_string(ds: &LabeledDataset, delimiter: u8, header: bool) -> String {
    let sep = delimiter as char;
    let mut s = String::new();
    if header {
        for j in 0..ds.dim() {
            s.push_str(&format!("f{}{sep}", j + 1));
        }
        s.push_str("label\n");
    }
    for (i, row) in ds.patterns().rows().enumerate() {
        for v in row {
            s.push_str(&format!("{v}{sep}"));
        }
        s.push_str(ds.registry().name(ds.label(i)));
        s.push('\n');
    }
    s
}

/// Per-feature mean and population standard deviation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationStats {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl NormalizationStats {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// Two-row CSV: means, then standard deviations.
    pub fn to_csv(&self) -> String {
        let join = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        format!("{}\n{}\n", join(&self.mean), join(&self.std))
    }
}

/// Mean and population std of every feature over the union of `datasets`.
pub fn compute_normalization(datasets: &[&LabeledDataset]) -> Result<NormalizationStats> {
    let sets: Vec<&PatternSet> = datasets.iter().map(|d| d.patterns()).collect();
    compute_pattern_stats(&sets)
}

/// As [`compute_normalization`], for unlabeled pattern sets.
pub fn compute_pattern_stats(sets: &[&PatternSet]) -> Result<NormalizationStats> {
    let dim = sets.first().ok_or(Error::EmptyDataset)?.dim();
    if let Some(bad) = sets.iter().find(|d| d.dim() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: bad.dim(),
        });
    }
    let n: usize = sets.iter().map(|d| d.len()).sum();
    if n == 0 {
        return Err(Error::EmptyDataset);
    }
    let nf = n as f64;
    let rows = || sets.iter().flat_map(|d| d.rows());

    let mut mean = vec![0.0; dim];
    for row in rows() {
        for (m, v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= nf);

    // Second pass: residual mean correction plus centered sum of squares.
    let mut resid = vec![0.0; dim];
    let mut sq = vec![0.0; dim];
    for row in rows() {
        for j in 0..dim {
            let d = row[j] - mean[j];
            resid[j] += d;
            sq[j] += d * d;
        }
    }
    let std = (0..dim)
        .map(|j| {
            let var = (sq[j] - resid[j] * resid[j] / nf) / nf;
            var.max(0.0).sqrt()
        })
        .collect();
    for j in 0..dim {
        mean[j] += resid[j] / nf;
    }
    Ok(NormalizationStats { mean, std })
}

/// Maps every feature to `(x - mean) / std`; zero-variance features become 0.
pub fn apply_normalization(ds: &LabeledDataset, stats: &NormalizationStats) -> Result<LabeledDataset> {
    ds.with_patterns(normalize_patterns(ds.patterns(), stats)?)
}

pub fn normalize_patterns(patterns: &PatternSet, stats: &NormalizationStats) -> Result<PatternSet> {
    let dim = patterns.dim();
    if stats.dim() != dim || stats.std.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: stats.dim(),
        });
    }
    let mut values = Vec::with_capacity(patterns.values().len());
    for row in patterns.rows() {
        for ((&x, &m), &s) in row.iter().zip(&stats.mean).zip(&stats.std) {
            values.push(if s > 0.0 { (x - m) / s } else { 0.0 });
        }
    }
    PatternSet::new(dim, values)
}

/// Seeded uniform (unstratified) split into `train_count` and `n - train_count`
/// patterns. Both parts keep the original relative order.
pub fn random_split(
    ds: &LabeledDataset,
    train_count: usize,
    seed: u64,
) -> Result<(LabeledDataset, LabeledDataset)> {
    let n = ds.len();
    if train_count == 0 || train_count >= n {
        return Err(Error::SplitOutOfRange { train_count, n });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let (train, test) = order.split_at_mut(train_count);
    train.sort_unstable();
    test.sort_unstable();
    Ok((ds.subset(train)?, ds.subset(test)?))
}
