//! Full desk-scale grid on a bundled dataset: 18 configurations x 10
//! bootstrap rates x 20 repeats of stratified two-fold CV, then the winner
//! with its p-value and the BR curve of every configuration.
//!
//! cargo run --release --example br_grid -- [iris|wine|sonar] [repeats]

use std::time::Instant;

use brforest::data::bundled;
use brforest::experiment::{analyze, br_curves, format_winners_table, run_grid, GridSpec};

fn main() -> brforest::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let ds = match args.first().map(String::as_str).unwrap_or("iris") {
        "wine" => bundled::wine()?,
        "sonar" => bundled::sonar()?,
        _ => bundled::iris()?,
    };
    let repeats = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(20);
    let spec = GridSpec {
        repeats,
        seed: 1,
        ..GridSpec::default()
    };
    let start = Instant::now();
    let grid = run_grid(&ds, &spec)?;
    println!("grid of {} cells in {:.1?}", grid.rows().count(), start.elapsed());

    print!("{}", format_winners_table(&[analyze(&grid)?]));
    println!();
    for curve in br_curves(&grid) {
        let pts: Vec<String> = curve.points.iter().map(|(_, a)| format!("{:.2}", 100.0 * a)).collect();
        println!("{:<12} {}", curve.config, pts.join(" "));
    }
    Ok(())
}
