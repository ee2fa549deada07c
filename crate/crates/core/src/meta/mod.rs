//! Meta-features that describe a dataset's class structure, and the
//! experiment that uses them to predict whether a dataset prefers bootstrap
//! rates above 1.
//!
//! The base features are the 65 `k_l` statistics: for `k` in 1..=10 nearest
//! neighbors (Manhattan distance on scaled data) and `l` in 0..=k, the
//! percentage of observations with exactly `l` same-class neighbors.

mod correlation;
mod evaluate;
mod features;
mod kl;
mod regime;

pub use correlation::{best_rate_targets, correlation_table, pairwise_spearman, CorrelationTable, MIN_PAIRS};
pub use evaluate::{meta_evaluate, select_features, MetaCell, MetaExperimentReport, MetaGrid};
pub use features::{interaction_count, interaction_features, FeaturePool, MetaFeatureMatrix};
pub use kl::{
    class_scaled_features, dataset_kl, kl_index, kl_names, kl_statistics, read_kl_csv, write_kl_csv, KLStats, MAX_K,
    N_KL,
};
pub use regime::{leave_two_out_splits, regime_labels, RegimeLabel, TrainValidationSplit};
