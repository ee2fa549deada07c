//! Neighborhood class-agreement statistics of the bundled datasets: the
//! share of points with exactly l same-class points among their k nearest
//! neighbors (Manhattan distance on scaled features).
//!
//! cargo run --release --example kl_statistics

use brforest::data::bundled;
use brforest::meta::{dataset_kl, interaction_count, N_KL};

fn main() -> brforest::Result<()> {
    for ds in [bundled::iris()?, bundled::wine()?, bundled::sonar()?] {
        let s = dataset_kl(&ds)?;
        println!("{} ({} classes)", s.dataset, s.n_classes);
        for k in [1, 2, 3, 5, 10] {
            let row: String = (0..=k).map(|l| format!("{:>6.1}", s.value(k, l))).collect();
            println!("  k={k:<2}{row}");
        }
    }
    println!("\n{N_KL} base features, {} pairwise interactions", interaction_count(N_KL));
    Ok(())
}
