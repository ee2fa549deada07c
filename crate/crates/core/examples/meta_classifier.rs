//! End-to-end meta-analysis on synthetic datasets: label each dataset by
//! whether its best bootstrap rate exceeds 1, correlate k_l features with
//! the best rate, then score the leave-two-out regime classifier.
//!
//! cargo run --release --example meta_classifier

use brforest::data::{synth_classification, SynthSpec};
use brforest::experiment::{analyze, run_grid, GridSpec};
use brforest::forest::named_config;
use brforest::meta::{
    correlation_table, dataset_kl, meta_evaluate, regime_labels, FeaturePool, MetaFeatureMatrix, MetaGrid, RegimeLabel,
};

fn main() -> brforest::Result<()> {
    let spec = GridSpec {
        configs: vec![named_config("base").unwrap().with_trees(30)],
        br_values: vec![0.4, 1.0, 3.0],
        repeats: 4,
        seed: 0,
    };
    let mut stats = Vec::new();
    let mut winners = Vec::new();
    for (i, (sep, clusters)) in [(0.4, 1), (0.8, 1), (1.5, 1), (0.4, 3), (0.8, 3), (1.5, 3), (0.6, 2), (1.2, 2)]
        .into_iter()
        .enumerate()
    {
        let mut ds = synth_classification(&SynthSpec {
            n_samples: 120,
            n_features: 4,
            n_classes: 2,
            n_clusters_per_class: clusters,
            class_sep: sep,
            seed: i as u64,
        })?;
        ds.set_name(format!("synth{i}"));
        stats.push(dataset_kl(&ds)?);
        winners.push(analyze(&run_grid(&ds, &spec)?)?);
    }

    let matrix = MetaFeatureMatrix::build(&stats, FeaturePool::BASE);
    let best: Vec<f64> = winners.iter().map(|w| w.best_br).collect();
    let table = correlation_table(&matrix, &[("best".to_owned(), best)])?;
    println!("strongest correlations with the best rate:");
    for (name, rho) in table.ranked(0).into_iter().take(5) {
        println!("  {name:<6} {:>6.3}", rho.unwrap_or(f64::NAN));
    }

    let labels = regime_labels(&winners, None);
    for (name, l) in &labels {
        print!("{name}={l} ");
    }
    println!();
    let regimes: Vec<RegimeLabel> = labels.iter().map(|l| l.1).collect();
    let grid = MetaGrid {
        br_values: vec![0.6, 1.0, 2.0],
        max_features: 4,
        ..MetaGrid::default()
    };
    match meta_evaluate(&matrix, &regimes, &grid) {
        Ok(report) => print!("{}", report.summary()),
        // small synthetic collections can land entirely in one regime
        Err(e) => println!("meta classifier skipped: {e}"),
    }
    Ok(())
}
