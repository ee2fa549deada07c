//! Raw CSV to encoded dataset: categorical columns are one-hot encoded,
//! missing cells imputed, identifier columns dropped.
//!
//! cargo run --example preprocess_csv

use brforest::data::{parse_csv, preprocess, LoadOptions};

const RAW: &str = "\
id,age,color,smoker,income,outcome
1,34,red,yes,52000,good
2,51,blue,no,?,bad
3,29,green,no,61000,good
4,,red,yes,47000,bad
5,45,blue,no,58000,good
6,38,green,yes,NA,bad
7,62,red,no,39000,good
8,27,blue,yes,71000,bad
";

fn main() -> brforest::Result<()> {
    let opts = LoadOptions {
        drop: ["id".to_owned()].into(),
        ..LoadOptions::default()
    };
    let raw = parse_csv(RAW.as_bytes(), "outcome", &opts)?;
    for col in &raw.columns {
        println!("{:<8} {} missing", col.name, col.values.n_missing());
    }

    let ds = preprocess(&raw, "toy")?;
    println!("\n{} rows, {} classes {:?}", ds.n_rows(), ds.n_classes(), ds.class_names());
    for (name, kind) in ds.feature_names().iter().zip(ds.feature_kinds()) {
        println!("{name:<14} {kind:?}");
    }
    println!("\nfirst row: {:?}", ds.row(0));
    Ok(())
}
