//! Fit forests at several bootstrap rates on one fold of Iris, score them
//! on the other, then save and reload a model.
//!
//! cargo run --release --example fit_and_predict

use brforest::data::{bundled, stratified_two_fold};
use brforest::forest::{fit_forest_on, load_model, named_config, save_model, SavedModel, Voting};

fn main() -> brforest::Result<()> {
    let ds = bundled::iris()?;
    let folds = stratified_two_fold(&ds, 0, 42);
    let (train, test) = (folds.indices(0), folds.indices(1));

    let mut last = None;
    for br in [0.2, 1.0, 3.0] {
        for voting in [Voting::Soft, Voting::Hard] {
            let mut cfg = named_config("RF(base)").unwrap().with_rate(br).with_seed(3);
            cfg.voting = voting;
            let rf = fit_forest_on(ds.view(), &train, &cfg)?;
            println!("BR {br:<4} {voting:?}: test accuracy {:.3}", rf.accuracy(ds.view(), &test));
            last = Some(rf);
        }
    }

    let forest = last.unwrap();
    let p = forest.predict(ds.row(test[0]))?;
    println!("\nrow {}: {} with probabilities {:?}", test[0], ds.class_names()[p.label], p.proba);

    let path = std::env::temp_dir().join("brforest_iris_model.json");
    save_model(
        &SavedModel {
            forest,
            class_names: ds.class_names().to_vec(),
            feature_names: ds.feature_names().to_vec(),
        },
        &path,
    )?;
    let loaded = load_model(&path)?;
    assert_eq!(loaded.forest.predict(ds.row(test[0]))?, p);
    println!("saved and reloaded {}", path.display());
    Ok(())
}
