//! Random forests with an unrestricted bootstrap rate.
//!
//! The bootstrap rate (BR) is the ratio between the number of draws in each
//! tree's bootstrap sample and the number of training rows. Classical bagging
//! uses BR = 1; this crate accepts any positive value, including BR > 1.
//!
//! Around the forest itself the crate provides the tooling needed to study
//! the effect of BR on a collection of datasets:
//!
//! - [`data`]: CSV ingestion, the preprocessing pipeline, stratified two-fold
//!   splits, synthetic generators, and the neighborhood scaling.
//! - [`tree`] and [`forest`]: CART trees over weighted bootstrap multisets and
//!   the soft-voting forest with the eighteen named configurations.
//! - [`stats`]: Student-t tail, paired one-sided t-test, Spearman correlation.
//! - [`experiment`]: repeated two-fold CV grids over (config, BR), winner
//!   selection, significance analysis, BR curves and histograms.
//! - [`meta`]: k-nearest-neighbor class-structure statistics (`k_l`),
//!   interaction features, correlation tables, and the leave-two-out
//!   classifier that predicts whether a dataset prefers BR <= 1 or BR > 1.
//!
//! The `brforest` binary wraps these pieces in a batch command-line tool, and
//! the `examples/` directory has one runnable program per capability.

pub mod cli;
pub mod data;
pub mod error;
pub mod experiment;
pub mod forest;
pub mod meta;
pub mod rng;
pub mod stats;
pub mod tree;

pub use data::{Dataset, DataView, FeatureKind};
pub use error::{Error, Result};
pub use forest::{fit_forest, ForestConfig, RandomForest};
pub use tree::{DecisionTree, FeatureSubset, SplitQuality, TreeConfig};
