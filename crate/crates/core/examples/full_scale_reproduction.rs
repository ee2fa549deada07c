//! Heavy mode: the full grid (18 configurations x 10 rates x 200 repeats)
//! on dataset manifests, followed by winners, k_l statistics, correlations
//! and the meta classifier with every configuration. Hours of compute for a
//! large collection; see scripts/reproduce.sh for the CLI equivalent.
//!
//! cargo run --release --example full_scale_reproduction -- OUT_DIR MANIFEST...

use std::fs::File;
use std::path::PathBuf;

use brforest::data::read_dataset;
use brforest::experiment::{analyze, format_winners_table, run_grid, write_grid_csv, GridSpec, FULL_REPEATS};
use brforest::meta::{
    best_rate_targets, correlation_table, dataset_kl, meta_evaluate, regime_labels, FeaturePool, MetaFeatureMatrix,
    MetaGrid, RegimeLabel,
};
use brforest::Error;

fn create(path: PathBuf) -> brforest::Result<File> {
    File::create(&path).map_err(|e| Error::Io { path, source: e })
}

fn main() -> brforest::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.len() < 2 {
        eprintln!("usage: full_scale_reproduction OUT_DIR MANIFEST...");
        std::process::exit(1);
    }
    let out = PathBuf::from(&args[0]);
    std::fs::create_dir_all(&out).map_err(|e| Error::Io {
        path: out.clone(),
        source: e,
    })?;
    let spec = GridSpec {
        repeats: FULL_REPEATS,
        ..GridSpec::default()
    };

    let (mut grids, mut stats) = (Vec::new(), Vec::new());
    for manifest in &args[1..] {
        let (_, ds) = read_dataset(manifest)?;
        eprintln!("{}: {} rows", ds.name(), ds.n_rows());
        let grid = run_grid(&ds, &spec)?;
        write_grid_csv(&grid, create(out.join(format!("{}.grid.csv", grids.len())))?)?;
        stats.push(dataset_kl(&ds)?);
        grids.push(grid);
    }
    let winners = grids.iter().map(analyze).collect::<brforest::Result<Vec<_>>>()?;
    print!("{}", format_winners_table(&winners));

    let matrix = MetaFeatureMatrix::build(&stats, FeaturePool::default());
    correlation_table(&matrix, &best_rate_targets(&grids)?)?.write_csv(create(out.join("correlations.csv"))?)?;

    for threshold in [None, Some(0.01)] {
        let labels = regime_labels(&winners, threshold);
        let names: Vec<String> = labels.iter().map(|l| l.0.clone()).collect();
        let regimes: Vec<RegimeLabel> = labels.iter().map(|l| l.1).collect();
        let report = meta_evaluate(&matrix.select_datasets(&names)?, &regimes, &MetaGrid::full())?;
        println!("p threshold {threshold:?}:\n{}", report.summary());
    }
    Ok(())
}
