//! Winner selection and the one-sided paired t-test against the opposite
//! side of BR = 1, on a reduced Wine grid. Writes a BR curve SVG.
//!
//! cargo run --release --example significance_report

use brforest::data::bundled;
use brforest::experiment::{
    analyze, br_curves, format_histogram, format_winners_table, per_config_winners, render_curves_svg, run_grid,
    winning_br_histogram, GridSpec,
};
use brforest::forest::named_config;

fn main() -> brforest::Result<()> {
    let ds = bundled::wine()?;
    let spec = GridSpec {
        configs: ["base", "qs_ent", "ml_5", "nf_all"]
            .iter()
            .map(|n| named_config(n).unwrap())
            .collect(),
        repeats: 10,
        ..GridSpec::default()
    };
    let grid = run_grid(&ds, &spec)?;

    let winner = analyze(&grid)?;
    print!("{}", format_winners_table(std::slice::from_ref(&winner)));
    println!("prefers BR > 1: {}\n", winner.prefers_high_rate());

    let per_config = per_config_winners(&grid);
    print!("{}", format_winners_table(&per_config));
    println!("\nwinning rates across configurations:");
    print!("{}", format_histogram(&winning_br_histogram(&per_config, None, &grid.br_values)));

    let path = std::env::temp_dir().join("wine_curves.svg");
    std::fs::write(&path, render_curves_svg(ds.name(), &br_curves(&grid))).map_err(|e| brforest::Error::Io {
        path: path.clone(),
        source: e,
    })?;
    println!("\ncurves written to {}", path.display());
    Ok(())
}
