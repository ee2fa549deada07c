//! Tabular data: loading, preprocessing, splitting and generation.

pub mod bundled;
mod folds;
mod generators;
mod io;
mod preprocess;
mod scale;
mod synth;
mod table;

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use folds::{stratified_two_fold, stratified_two_fold_labels, FoldAssignment};
pub use generators::{ringnorm, threenorm, twonorm, waveform};
pub use io::{read_dataset, write_dataset, DatasetManifest};
pub use preprocess::preprocess;
pub use scale::neighborhood_scale;
pub use synth::{cluster_centers, synth_classification, SynthSpec};
pub use table::{load_csv, parse_csv, ColumnValues, LoadOptions, RawColumn, RawTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureKind {
    Continuous,
    Binary,
}

/// Encoded, fully numeric classification data.
///
/// Features are stored row-major. Labels are class ids in `0..n_classes`,
/// and `class_names[id]` is the original label text.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    name: String,
    features: Vec<f64>,
    n_rows: usize,
    n_features: usize,
    feature_kinds: Vec<FeatureKind>,
    feature_names: Vec<String>,
    labels: Vec<usize>,
    class_names: Vec<String>,
}

impl Dataset {
    /// Builds a dataset, checking shapes, label range and finiteness.
    ///
    /// The stronger invariants produced by [`preprocess`] (every class at
    /// least twice, no constant column, no duplicate row) are not enforced
    /// here; see [`Dataset::check_invariants`].
    pub fn new(
        name: impl Into<String>,
        features: Vec<f64>,
        n_features: usize,
        feature_kinds: Vec<FeatureKind>,
        labels: Vec<usize>,
        class_names: Vec<String>,
    ) -> Result<Self> {
        if n_features == 0 {
            return Err(Error::data("dataset needs at least one feature"));
        }
        if features.len() != labels.len() * n_features {
            return Err(Error::data(format!(
                "feature matrix has {} values, expected {} rows x {} features",
                features.len(),
                labels.len(),
                n_features
            )));
        }
        if feature_kinds.len() != n_features {
            return Err(Error::data("feature_kinds length differs from feature count"));
        }
        if labels.len() < 2 {
            return Err(Error::data("dataset needs at least two rows"));
        }
        if class_names.len() < 2 {
            return Err(Error::data("dataset needs at least two classes"));
        }
        if let Some(&bad) = labels.iter().find(|&&y| y >= class_names.len()) {
            return Err(Error::data(format!(
                "label {bad} out of range for {} classes",
                class_names.len()
            )));
        }
        if let Some(pos) = features.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(pos % n_features));
        }
        let n_rows = labels.len();
        let feature_names = (0..n_features).map(|j| format!("x{j}")).collect();
        Ok(Self {
            name: name.into(),
            features,
            n_rows,
            n_features,
            feature_kinds,
            feature_names,
            labels,
            class_names,
        })
    }

    /// Convenience constructor for all-continuous data with classes named by id.
    pub fn from_rows(name: impl Into<String>, rows: &[Vec<f64>], labels: Vec<usize>) -> Result<Self> {
        let n_features = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_features) {
            return Err(Error::data("rows have differing lengths"));
        }
        let n_classes = labels.iter().max().map_or(0, |&m| m + 1).max(2);
        let class_names = (0..n_classes).map(|c| c.to_string()).collect();
        Self::new(
            name,
            rows.concat(),
            n_features,
            vec![FeatureKind::Continuous; n_features],
            labels,
            class_names,
        )
    }

    pub fn with_feature_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.n_features {
            return Err(Error::data("feature name count differs from feature count"));
        }
        self.feature_names = names;
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn features(&self) -> &[f64] {
        &self.features
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.n_features..(i + 1) * self.n_features]
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = f64> + '_ {
        self.features.iter().skip(j).step_by(self.n_features).copied()
    }

    pub fn feature_kinds(&self) -> &[FeatureKind] {
        &self.feature_kinds
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn n_kind(&self, kind: FeatureKind) -> usize {
        self.feature_kinds.iter().filter(|&&k| k == kind).count()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes()];
        for &y in &self.labels {
            counts[y] += 1;
        }
        counts
    }

    pub fn view(&self) -> DataView<'_> {
        DataView {
            features: &self.features,
            n_features: self.n_features,
            labels: &self.labels,
            n_classes: self.n_classes(),
        }
    }

    /// Returns a copy with only the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Result<Self> {
        let mut features = Vec::with_capacity(rows.len() * self.n_features);
        let mut labels = Vec::with_capacity(rows.len());
        for &i in rows {
            features.extend_from_slice(self.row(i));
            labels.push(self.labels[i]);
        }
        let mut out = Self::new(
            self.name.clone(),
            features,
            self.n_features,
            self.feature_kinds.clone(),
            labels,
            self.class_names.clone(),
        )?;
        out.feature_names = self.feature_names.clone();
        Ok(out)
    }

    pub(crate) fn map_features(&self, features: Vec<f64>) -> Self {
        debug_assert_eq!(features.len(), self.features.len());
        Self {
            features,
            ..self.clone()
        }
    }

    /// Checks the invariants guaranteed by the preprocessing pipeline:
    /// every class occurs at least twice, no column is constant, and no two
    /// rows are identical (features and label).
    pub fn check_invariants(&self) -> Result<()> {
        if let Some((c, _)) = self
            .class_counts()
            .iter()
            .enumerate()
            .find(|(_, &n)| n < 2)
        {
            return Err(Error::data(format!("class {c} occurs fewer than twice")));
        }
        for j in 0..self.n_features {
            let first = self.features[j];
            if self.column(j).all(|v| v == first) {
                return Err(Error::data(format!("column {j} is constant")));
            }
        }
        let mut seen = HashSet::with_capacity(self.n_rows);
        for i in 0..self.n_rows {
            let key: (Vec<u64>, usize) = (
                self.row(i).iter().map(|v| (v + 0.0).to_bits()).collect(),
                self.labels[i],
            );
            if !seen.insert(key) {
                return Err(Error::data(format!("row {i} duplicates an earlier row")));
            }
        }
        Ok(())
    }
}

/// Borrowed row-major feature matrix with labels; the input to tree and
/// forest fitting.
#[derive(Debug, Clone, Copy)]
pub struct DataView<'a> {
    pub features: &'a [f64],
    pub n_features: usize,
    pub labels: &'a [usize],
    pub n_classes: usize,
}

impl<'a> DataView<'a> {
    pub fn new(features: &'a [f64], n_features: usize, labels: &'a [usize], n_classes: usize) -> Result<Self> {
        if n_features == 0 || features.len() != labels.len() * n_features {
            return Err(Error::data("feature matrix shape does not match labels"));
        }
        if labels.iter().any(|&y| y >= n_classes) {
            return Err(Error::data("label out of range"));
        }
        Ok(Self {
            features,
            n_features,
            labels,
            n_classes,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    #[inline]
    pub fn value(&self, row: usize, feature: usize) -> f64 {
        self.features[row * self.n_features + feature]
    }

    pub fn row(&self, i: usize) -> &'a [f64] {
        &self.features[i * self.n_features..(i + 1) * self.n_features]
    }
}
