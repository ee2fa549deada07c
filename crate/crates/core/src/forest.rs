//! Soft-voting random forests with an arbitrary positive bootstrap rate.

use std::fs;
use std::path::Path;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{DataView, Dataset};
use crate::error::{Error, Result};
use crate::rng;
use crate::tree::{self, DecisionTree, FeatureSubset, SplitQuality, TreeConfig};

const TREE_STREAM: u64 = 0x7EE5;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Voting {
    /// Average of per-tree leaf class frequencies.
    #[default]
    Soft,
    /// Fraction of trees whose leaf argmax is each class.
    Hard,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestConfig {
    pub name: String,
    pub n_trees: usize,
    pub tree: TreeConfig,
    pub bootstrap_rate: f64,
    pub seed: u64,
    #[serde(default)]
    pub voting: Voting,
}

impl Default for ForestConfig {
    fn default() -> Self {
        Self {
            name: "RF(base)".into(),
            n_trees: 100,
            tree: TreeConfig::default(),
            bootstrap_rate: 1.0,
            seed: 0,
            voting: Voting::Soft,
        }
    }
}

impl ForestConfig {
    pub fn with_rate(mut self, bootstrap_rate: f64) -> Self {
        self.bootstrap_rate = bootstrap_rate;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_trees(mut self, n_trees: usize) -> Self {
        self.n_trees = n_trees;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_trees == 0 {
            return Err(Error::invalid("n_trees must be at least 1"));
        }
        if !(self.bootstrap_rate > 0.0 && self.bootstrap_rate.is_finite()) {
            return Err(Error::invalid(format!(
                "bootstrap rate must be positive and finite, got {}",
                self.bootstrap_rate
            )));
        }
        self.tree.validate()
    }
}

/// `RF(base)` followed by the seventeen single-parameter variants.
pub fn named_configs() -> Vec<ForestConfig> {
    let base = ForestConfig::default();
    let variant = |tag: &str, edit: &dyn Fn(&mut ForestConfig)| {
        let mut c = base.clone();
        c.name = format!("RF({tag})");
        edit(&mut c);
        c
    };
    let mut out = vec![base.clone()];
    for nt in [200, 500] {
        out.push(variant(&format!("nt_{nt}"), &|c| c.n_trees = nt));
    }
    for md in [10, 15, 20, 25] {
        out.push(variant(&format!("md_{md}"), &|c| c.tree.max_depth = Some(md)));
    }
    out.push(variant("qs_ent", &|c| c.tree.split_quality = SplitQuality::Entropy));
    for mn in [3, 4, 6, 8] {
        out.push(variant(&format!("mn_{mn}"), &|c| c.tree.min_samples_split = mn));
    }
    for ml in [2, 3, 4, 5] {
        out.push(variant(&format!("ml_{ml}"), &|c| c.tree.min_samples_leaf = ml));
    }
    out.push(variant("nf_log", &|c| c.tree.feature_subset = FeatureSubset::Log2));
    out.push(variant("nf_all", &|c| c.tree.feature_subset = FeatureSubset::All));
    out
}

/// Looks up a named configuration; accepts `RF(ml_5)` or the bare `ml_5`.
pub fn named_config(name: &str) -> Option<ForestConfig> {
    let bare = name
        .strip_prefix("RF(")
        .and_then(|s| s.strip_suffix(')'))
        .unwrap_or(name);
    named_configs()
        .into_iter()
        .find(|c| c.name[3..c.name.len() - 1] == *bare)
}

/// Number of draws for a bootstrap of `n_rows` at rate `rate`:
/// `round(rate * n_rows)` with halves rounded away from zero.
pub fn bootstrap_size(n_rows: usize, rate: f64) -> Result<usize> {
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(Error::invalid(format!("bootstrap rate must be positive, got {rate}")));
    }
    let m = (rate * n_rows as f64).round() as usize;
    if m == 0 {
        return Err(Error::EmptyBootstrap { rate, n_rows });
    }
    Ok(m)
}

/// Uniform draws with replacement from `0..n_rows`.
pub fn bootstrap_sample<R: Rng>(n_rows: usize, rate: f64, rng: &mut R) -> Result<Vec<usize>> {
    let m = bootstrap_size(n_rows, rate)?;
    Ok((0..m).map(|_| rng.random_range(0..n_rows)).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    pub trees: Vec<DecisionTree>,
    pub n_classes: usize,
    pub n_features: usize,
    pub config: ForestConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub label: usize,
    pub proba: Vec<f64>,
}

/// Fits on every row of `ds`.
pub fn fit_forest(ds: &Dataset, config: &ForestConfig) -> Result<RandomForest> {
    let rows: Vec<usize> = (0..ds.n_rows()).collect();
    fit_forest_on(ds.view(), &rows, config)
}

/// Fits on the training subset `rows` of `data`.
///
/// Tree `i` uses its own RNG stream derived from `(config.seed, i)`, so the
/// result does not depend on how trees are scheduled across threads.
pub fn fit_forest_on(data: DataView<'_>, rows: &[usize], config: &ForestConfig) -> Result<RandomForest> {
    config.validate()?;
    if let Some(&r) = rows.iter().find(|&&r| r >= data.n_rows()) {
        return Err(Error::invalid(format!("row {r} out of range")));
    }
    let draws = bootstrap_size(rows.len(), config.bootstrap_rate)?;
    let fit_one = |i: usize| -> Result<DecisionTree> {
        let mut rng = rng::stream(config.seed, &[TREE_STREAM, i as u64]);
        let sample: Vec<usize> = (0..draws).map(|_| rows[rng.random_range(0..rows.len())]).collect();
        tree::fit_tree(data, &sample, &config.tree, &mut rng)
    };
    let trees = (0..config.n_trees)
        .into_par_iter()
        .map(fit_one)
        .collect::<Result<Vec<_>>>()?;
    Ok(RandomForest {
        trees,
        n_classes: data.n_classes,
        n_features: data.n_features,
        config: config.clone(),
    })
}

impl RandomForest {
    pub fn predict(&self, x: &[f64]) -> Result<Prediction> {
        tree::check_input(x, self.n_features)?;
        let proba = self.proba_unchecked(x);
        Ok(Prediction {
            label: argmax(&proba),
            proba,
        })
    }

    pub fn predict_batch(&self, rows: &[Vec<f64>]) -> Result<Vec<Prediction>> {
        rows.par_iter().map(|x| self.predict(x)).collect()
    }

    /// Predicted labels for rows of a view, without per-row validation.
    pub fn predict_labels(&self, data: DataView<'_>, rows: &[usize]) -> Vec<usize> {
        let mut proba = vec![0.0; self.n_classes];
        rows.iter()
            .map(|&r| {
                self.accumulate(data.row(r), &mut proba);
                argmax(&proba)
            })
            .collect()
    }

    /// Fraction of `rows` whose label is predicted correctly.
    pub fn accuracy(&self, data: DataView<'_>, rows: &[usize]) -> f64 {
        if rows.is_empty() {
            return f64::NAN;
        }
        let predicted = self.predict_labels(data, rows);
        let correct = rows
            .iter()
            .zip(&predicted)
            .filter(|(&r, &p)| data.labels[r] == p)
            .count();
        correct as f64 / rows.len() as f64
    }

    fn proba_unchecked(&self, x: &[f64]) -> Vec<f64> {
        let mut proba = vec![0.0; self.n_classes];
        self.accumulate(x, &mut proba);
        proba
    }

    fn accumulate(&self, x: &[f64], proba: &mut [f64]) {
        proba.iter_mut().for_each(|p| *p = 0.0);
        for t in &self.trees {
            let counts = t.leaf_counts(x);
            match self.config.voting {
                Voting::Soft => {
                    let total: f64 = counts.iter().map(|&c| f64::from(c)).sum();
                    for (p, &c) in proba.iter_mut().zip(counts) {
                        *p += f64::from(c) / total;
                    }
                }
                Voting::Hard => {
                    let best = counts
                        .iter()
                        .enumerate()
                        .fold(0, |b, (k, &c)| if c > counts[b] { k } else { b });
                    proba[best] += 1.0;
                }
            }
        }
        let n = self.trees.len() as f64;
        proba.iter_mut().for_each(|p| *p /= n);
    }
}

/// Index of the largest value; ties go to the lowest index.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (k, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = k;
        }
    }
    best
}

const MODEL_FORMAT: &str = "brforest-model";
const MODEL_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    #[serde(default)]
    class_names: Vec<String>,
    #[serde(default)]
    feature_names: Vec<String>,
    forest: RandomForest,
}

/// A forest plus the label and feature names needed to interpret it.
#[derive(Debug, Clone, PartialEq)]
pub struct SavedModel {
    pub forest: RandomForest,
    pub class_names: Vec<String>,
    pub feature_names: Vec<String>,
}

pub fn save_model(model: &SavedModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = ModelFile {
        format: MODEL_FORMAT.into(),
        version: MODEL_VERSION,
        class_names: model.class_names.clone(),
        feature_names: model.feature_names.clone(),
        forest: model.forest.clone(),
    };
    let text = serde_json::to_string(&file)?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<SavedModel> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let file: ModelFile = serde_json::from_str(&text)?;
    if file.format != MODEL_FORMAT {
        return Err(Error::data(format!("{}: not a model file", path.display())));
    }
    if file.version != MODEL_VERSION {
        return Err(Error::data(format!(
            "{}: unsupported model version {}",
            path.display(),
            file.version
        )));
    }
    Ok(SavedModel {
        forest: file.forest,
        class_names: file.class_names,
        feature_names: file.feature_names,
    })
}
