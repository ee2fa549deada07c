//! CART classification trees grown on weighted bootstrap multisets.
//!
//! A row drawn `m` times into a bootstrap sample carries weight `m`: it
//! counts `m` times in class frequencies, impurities, and in the
//! `min_samples_split` / `min_samples_leaf` constraints. Internally the
//! multiset is compacted to distinct rows with integer weights, which keeps
//! the split search proportional to the number of distinct rows even for
//! large bootstrap rates.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::data::DataView;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitQuality {
    Gini,
    Entropy,
}

/// Number of features examined at each node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureSubset {
    Sqrt,
    Log2,
    All,
}

impl FeatureSubset {
    /// `floor(sqrt(d))`, `floor(log2(d))` or `d`, never below one.
    pub fn size(self, n_features: usize) -> usize {
        let d = n_features as f64;
        let s = match self {
            FeatureSubset::Sqrt => d.sqrt().floor() as usize,
            FeatureSubset::Log2 => d.log2().floor().max(0.0) as usize,
            FeatureSubset::All => n_features,
        };
        s.clamp(1, n_features.max(1))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeConfig {
    pub max_depth: Option<usize>,
    pub min_samples_split: u32,
    pub min_samples_leaf: u32,
    pub split_quality: SplitQuality,
    pub feature_subset: FeatureSubset,
}

impl Default for TreeConfig {
    fn default() -> Self {
        Self {
            max_depth: None,
            min_samples_split: 2,
            min_samples_leaf: 1,
            split_quality: SplitQuality::Gini,
            feature_subset: FeatureSubset::Sqrt,
        }
    }
}

impl TreeConfig {
    /// Fully grown tree over all features: the configuration whose
    /// resubstitution accuracy is 100% on consistent data.
    pub fn unrestricted() -> Self {
        Self {
            feature_subset: FeatureSubset::All,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.min_samples_split < 2 {
            return Err(Error::invalid("min_samples_split must be at least 2"));
        }
        if self.min_samples_leaf < 1 {
            return Err(Error::invalid("min_samples_leaf must be at least 1"));
        }
        if self.max_depth == Some(0) {
            return Err(Error::invalid("max_depth must be at least 1 when set"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TreeNode {
    Internal {
        feature: usize,
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
    Leaf {
        class_counts: Vec<u32>,
    },
}

impl TreeNode {
    fn visit_leaves<'a>(&'a self, depth: usize, f: &mut impl FnMut(&'a [u32], usize)) {
        match self {
            TreeNode::Leaf { class_counts } => f(class_counts, depth),
            TreeNode::Internal { left, right, .. } => {
                left.visit_leaves(depth + 1, f);
                right.visit_leaves(depth + 1, f);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub root: TreeNode,
    pub n_classes: usize,
    pub n_features: usize,
    pub config: TreeConfig,
}

impl DecisionTree {
    /// Class counts of the leaf reached by `x`. `x` must have `n_features`
    /// finite values; use [`predict_tree`] for a checked call.
    #[inline]
    pub fn leaf_counts(&self, x: &[f64]) -> &[u32] {
        let mut node = &self.root;
        loop {
            match node {
                TreeNode::Leaf { class_counts } => return class_counts,
                TreeNode::Internal {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    node = if x[*feature] <= *threshold { left } else { right };
                }
            }
        }
    }

    pub fn n_leaves(&self) -> usize {
        let mut n = 0;
        self.root.visit_leaves(0, &mut |_, _| n += 1);
        n
    }

    pub fn depth(&self) -> usize {
        let mut d = 0;
        self.root.visit_leaves(0, &mut |_, depth| d = d.max(depth));
        d
    }

    pub fn leaves(&self) -> Vec<(&[u32], usize)> {
        let mut out = Vec::new();
        self.root.visit_leaves(0, &mut |c, d| out.push((c, d)));
        out
    }
}

/// Gini (`1 - sum p_i^2`) or Shannon entropy in bits (`-sum p_i log2 p_i`)
/// of a class-count vector.
pub fn impurity(class_counts: &[u32], quality: SplitQuality) -> Result<f64> {
    let total: u64 = class_counts.iter().map(|&c| u64::from(c)).sum();
    if total == 0 {
        return Err(Error::EmptyNode);
    }
    Ok(impurity_of(class_counts, total as f64, quality))
}

#[inline]
fn impurity_of(counts: &[u32], total: f64, quality: SplitQuality) -> f64 {
    match quality {
        SplitQuality::Gini => {
            let mut sum_sq = 0.0;
            for &c in counts {
                let p = f64::from(c) / total;
                sum_sq += p * p;
            }
            1.0 - sum_sq
        }
        SplitQuality::Entropy => {
            let mut h = 0.0;
            for &c in counts {
                if c > 0 {
                    let p = f64::from(c) / total;
                    h -= p * p.log2();
                }
            }
            h
        }
    }
}

/// Total-weighted impurity of a two-way partition.
#[inline]
pub fn weighted_child_impurity(left: &[u32], right: &[u32], quality: SplitQuality) -> f64 {
    let wl: u64 = left.iter().map(|&c| u64::from(c)).sum();
    let wr: u64 = right.iter().map(|&c| u64::from(c)).sum();
    combine(
        wl as f64,
        impurity_of(left, wl as f64, quality),
        wr as f64,
        impurity_of(right, wr as f64, quality),
    )
}

#[inline]
fn combine(wl: f64, il: f64, wr: f64, ir: f64) -> f64 {
    (wl * il + wr * ir) / (wl + wr)
}

#[inline]
fn midpoint(lo: f64, hi: f64) -> f64 {
    let t = 0.5 * (lo + hi);
    if t < hi && t.is_finite() {
        t
    } else {
        lo
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Split {
    pub feature: usize,
    pub threshold: f64,
    pub weighted_child_impurity: f64,
}

impl Split {
    /// Lower impurity wins; exact ties go to the lower feature index, then
    /// the lower threshold.
    fn beats(&self, other: &Split) -> bool {
        (self.weighted_child_impurity, self.feature, self.threshold)
            .partial_cmp(&(other.weighted_child_impurity, other.feature, other.threshold))
            == Some(std::cmp::Ordering::Less)
    }
}

enum FeatureScan {
    Constant,
    NoValidSplit,
    Best { threshold: f64, impurity: f64 },
}

/// Distinct training rows with bootstrap weights, features column-major.
struct Grower<'a> {
    config: &'a TreeConfig,
    n_features: usize,
    n_classes: usize,
    n_local: usize,
    columns: Vec<f64>,
    labels: Vec<usize>,
    weights: Vec<u32>,
    feature_order: Vec<usize>,
    scratch: Vec<(f64, u32)>,
    left: Vec<u32>,
    right: Vec<u32>,
}

impl<'a> Grower<'a> {
    fn new(data: DataView<'_>, sample: &[usize], config: &'a TreeConfig) -> Result<Self> {
        let n = data.n_rows();
        let mut multiplicity = vec![0u32; n];
        for &i in sample {
            if i >= n {
                return Err(Error::invalid(format!("sample index {i} out of range for {n} rows")));
            }
            multiplicity[i] += 1;
        }
        let rows: Vec<usize> = (0..n).filter(|&i| multiplicity[i] > 0).collect();
        let n_local = rows.len();
        let d = data.n_features;
        let mut columns = vec![0.0; d * n_local];
        for (local, &i) in rows.iter().enumerate() {
            for (f, &v) in data.row(i).iter().enumerate() {
                columns[f * n_local + local] = v;
            }
        }
        Ok(Self {
            config,
            n_features: d,
            n_classes: data.n_classes,
            n_local,
            columns,
            labels: rows.iter().map(|&i| data.labels[i]).collect(),
            weights: rows.iter().map(|&i| multiplicity[i]).collect(),
            feature_order: (0..d).collect(),
            scratch: Vec::with_capacity(n_local),
            left: vec![0; data.n_classes],
            right: vec![0; data.n_classes],
        })
    }

    fn value(&self, feature: usize, local: u32) -> f64 {
        self.columns[feature * self.n_local + local as usize]
    }

    fn node_counts(&self, idx: &[u32]) -> Vec<u32> {
        let mut counts = vec![0u32; self.n_classes];
        for &r in idx {
            counts[self.labels[r as usize]] += self.weights[r as usize];
        }
        counts
    }

    fn scan_feature(&mut self, feature: usize, idx: &[u32], counts: &[u32], total: u32) -> FeatureScan {
        let quality = self.config.split_quality;
        let min_leaf = self.config.min_samples_leaf;
        let base = feature * self.n_local;
        self.scratch.clear();
        self.scratch
            .extend(idx.iter().map(|&r| (self.columns[base + r as usize], r)));
        self.scratch.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
        let last = self.scratch.len() - 1;
        if self.scratch[0].0 == self.scratch[last].0 {
            return FeatureScan::Constant;
        }

        self.left.iter_mut().for_each(|c| *c = 0);
        let mut wl = 0u32;
        let mut best: Option<(f64, f64)> = None;
        let total_f = f64::from(total);
        for i in 0..last {
            let (v, r) = self.scratch[i];
            let w = self.weights[r as usize];
            self.left[self.labels[r as usize]] += w;
            wl += w;
            let next = self.scratch[i + 1].0;
            if v == next || wl < min_leaf {
                continue;
            }
            let wr = total - wl;
            if wr < min_leaf {
                break;
            }
            for ((rc, &c), &lc) in self.right.iter_mut().zip(counts).zip(&self.left) {
                *rc = c - lc;
            }
            let il = impurity_of(&self.left, f64::from(wl), quality);
            let ir = impurity_of(&self.right, f64::from(wr), quality);
            let imp = combine(f64::from(wl), il, f64::from(wr), ir);
            debug_assert!((wl as f64 + wr as f64) == total_f);
            if best.is_none_or(|(b, _)| imp < b) {
                best = Some((imp, midpoint(v, next)));
            }
        }
        match best {
            Some((impurity, threshold)) => FeatureScan::Best { threshold, impurity },
            None => FeatureScan::NoValidSplit,
        }
    }

    fn consider(best: &mut Option<Split>, candidate: Split) {
        if best.as_ref().is_none_or(|b| candidate.beats(b)) {
            *best = Some(candidate);
        }
    }

    fn best_over(&mut self, features: &[usize], idx: &[u32], counts: &[u32], total: u32) -> Option<Split> {
        let mut best = None;
        for &f in features {
            if let FeatureScan::Best { threshold, impurity } = self.scan_feature(f, idx, counts, total) {
                Self::consider(
                    &mut best,
                    Split {
                        feature: f,
                        threshold,
                        weighted_child_impurity: impurity,
                    },
                );
            }
        }
        best
    }

    /// Draws features uniformly without replacement until `subset` of them
    /// have been found non-constant within the node (or all are exhausted).
    fn best_random<R: Rng>(&mut self, idx: &[u32], counts: &[u32], total: u32, rng: &mut R) -> Option<Split> {
        let subset = self.config.feature_subset.size(self.n_features);
        let d = self.n_features;
        let mut best = None;
        let mut visited = 0;
        for i in 0..d {
            if visited == subset {
                break;
            }
            let j = rng.random_range(i..d);
            self.feature_order.swap(i, j);
            let f = self.feature_order[i];
            match self.scan_feature(f, idx, counts, total) {
                FeatureScan::Constant => continue,
                FeatureScan::NoValidSplit => {}
                FeatureScan::Best { threshold, impurity } => Self::consider(
                    &mut best,
                    Split {
                        feature: f,
                        threshold,
                        weighted_child_impurity: impurity,
                    },
                ),
            }
            visited += 1;
        }
        best
    }

    fn grow<R: Rng>(&mut self, idx: &mut [u32], depth: usize, rng: &mut R) -> TreeNode {
        let counts = self.node_counts(idx);
        let total: u32 = counts.iter().sum();
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        if pure
            || total < self.config.min_samples_split
            || self.config.max_depth.is_some_and(|md| depth >= md)
            || idx.len() < 2
        {
            return TreeNode::Leaf { class_counts: counts };
        }
        let Some(split) = self.best_random(idx, &counts, total, rng) else {
            return TreeNode::Leaf { class_counts: counts };
        };

        let mut mid = 0;
        for k in 0..idx.len() {
            if self.value(split.feature, idx[k]) <= split.threshold {
                idx.swap(mid, k);
                mid += 1;
            }
        }
        debug_assert!(mid > 0 && mid < idx.len());
        let (lo, hi) = idx.split_at_mut(mid);
        let left = self.grow(lo, depth + 1, rng);
        let right = self.grow(hi, depth + 1, rng);
        TreeNode::Internal {
            feature: split.feature,
            threshold: split.threshold,
            left: Box::new(left),
            right: Box::new(right),
        }
    }
}

/// Best split of a row multiset over the given candidate features.
///
/// Candidate thresholds are midpoints between consecutive distinct values.
/// The split minimizing the weighted child impurity wins, subject to both
/// children holding at least `min_samples_leaf` (weighted) samples. Returns
/// `None` when no candidate satisfies the leaf constraint.
pub fn best_split(
    data: DataView<'_>,
    rows: &[usize],
    features: &[usize],
    quality: SplitQuality,
    min_samples_leaf: u32,
) -> Result<Option<Split>> {
    if let Some(&f) = features.iter().find(|&&f| f >= data.n_features) {
        return Err(Error::invalid(format!("feature {f} out of range")));
    }
    if rows.len() < 2 {
        return Ok(None);
    }
    let config = TreeConfig {
        split_quality: quality,
        min_samples_leaf: min_samples_leaf.max(1),
        ..TreeConfig::default()
    };
    let mut grower = Grower::new(data, rows, &config)?;
    let idx: Vec<u32> = (0..grower.n_local as u32).collect();
    let counts = grower.node_counts(&idx);
    let total = counts.iter().sum();
    Ok(grower.best_over(features, &idx, &counts, total))
}

/// Grows a tree on a multiset of row indices of `data`.
///
/// A node becomes a leaf when it is pure, its weight is below
/// `min_samples_split`, it sits at `max_depth`, or no valid split exists
/// among the drawn features.
pub fn fit_tree<R: Rng>(
    data: DataView<'_>,
    sample: &[usize],
    config: &TreeConfig,
    rng: &mut R,
) -> Result<DecisionTree> {
    config.validate()?;
    if sample.is_empty() {
        return Err(Error::invalid("cannot fit a tree on an empty sample"));
    }
    let mut grower = Grower::new(data, sample, config)?;
    let mut idx: Vec<u32> = (0..grower.n_local as u32).collect();
    let root = grower.grow(&mut idx, 0, rng);
    Ok(DecisionTree {
        root,
        n_classes: data.n_classes,
        n_features: data.n_features,
        config: config.clone(),
    })
}

/// Class distribution of the leaf reached by `x`.
pub fn predict_tree(tree: &DecisionTree, x: &[f64]) -> Result<Vec<f64>> {
    check_input(x, tree.n_features)?;
    let counts = tree.leaf_counts(x);
    let total: f64 = counts.iter().map(|&c| f64::from(c)).sum();
    Ok(counts.iter().map(|&c| f64::from(c) / total).collect())
}

pub(crate) fn check_input(x: &[f64], n_features: usize) -> Result<()> {
    if x.len() != n_features {
        return Err(Error::Dimension {
            expected: n_features,
            found: x.len(),
        });
    }
    if let Some(j) = x.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(j));
    }
    Ok(())
}
