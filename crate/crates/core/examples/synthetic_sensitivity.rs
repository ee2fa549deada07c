//! Best bootstrap rate of RF(base) on synthetic problems of increasing
//! difficulty: hypercube clusters at several separations and the classic
//! twonorm / threenorm / ringnorm / waveform generators.
//!
//! cargo run --release --example synthetic_sensitivity

use brforest::data::{ringnorm, synth_classification, threenorm, twonorm, waveform, SynthSpec};
use brforest::experiment::{br_curves, run_grid, GridSpec};
use brforest::forest::named_config;
use brforest::Dataset;

fn main() -> brforest::Result<()> {
    let mut sets: Vec<Dataset> = Vec::new();
    for sep in [0.5, 1.0, 2.0] {
        let mut ds = synth_classification(&SynthSpec {
            n_samples: 200,
            n_features: 5,
            n_classes: 3,
            n_clusters_per_class: 2,
            class_sep: sep,
            seed: 11,
        })?;
        ds.set_name(format!("hypercube sep={sep}"));
        sets.push(ds);
    }
    sets.extend([twonorm(200, 1)?, threenorm(200, 1)?, ringnorm(200, 1)?, waveform(200, 1)?]);

    let spec = GridSpec {
        configs: vec![named_config("base").unwrap().with_trees(50)],
        br_values: vec![0.2, 0.6, 1.0, 2.0, 5.0],
        repeats: 5,
        seed: 0,
    };
    println!("{:<20} {}", "dataset", spec.br_values.iter().map(|b| format!("{b:>7}")).collect::<String>());
    for ds in &sets {
        let curve = &br_curves(&run_grid(ds, &spec)?)[0];
        let best = curve.points.iter().max_by(|a, b| a.1.total_cmp(&b.1)).unwrap().0;
        let accs: String = curve.points.iter().map(|(_, a)| format!("{:>7.2}", 100.0 * a)).collect();
        println!("{:<20} {accs}   best BR {best}", ds.name());
    }
    Ok(())
}
