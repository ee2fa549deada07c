//! Small public-domain datasets shipped with the crate, already in the
//! layout `load_csv` expects (header row, target column `class`).

use super::{parse_csv, preprocess, Dataset, LoadOptions};
use crate::error::Result;

const IRIS: &str = include_str!("../../data/iris.csv");
const WINE: &str = include_str!("../../data/wine.csv");
const SONAR: &str = include_str!("../../data/sonar.csv");

/// Best configuration, accuracy, rate and p-value of the 36 benchmark
/// datasets, as CSV with columns
/// `dataset,best_config,accuracy_pct,best_br,max_p_value`.
pub const REFERENCE_WINNERS_CSV: &str = include_str!("../../data/reference_winners.csv");

fn load(text: &str, name: &str) -> Result<Dataset> {
    let raw = parse_csv(text.as_bytes(), "class", &LoadOptions::default())?;
    preprocess(&raw, name)
}

/// Fisher's iris: 4 continuous features, 3 classes, 149 distinct rows.
pub fn iris() -> Result<Dataset> {
    load(IRIS, "Iris")
}

/// UCI wine recognition: 13 continuous features, 3 cultivars, 178 rows.
pub fn wine() -> Result<Dataset> {
    load(WINE, "Wine")
}

/// Gorman and Sejnowski's sonar returns: 60 bands, mines vs. rocks, 208 rows.
pub fn sonar() -> Result<Dataset> {
    load(SONAR, "Sonar, Mines vs. Rocks")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::FeatureKind;

    #[test]
    fn bundled_shapes() {
        for (ds, n, d, c) in [
            (iris().unwrap(), 149, 4, 3),
            (wine().unwrap(), 178, 13, 3),
            (sonar().unwrap(), 208, 60, 2),
        ] {
            assert_eq!((ds.n_rows(), ds.n_features(), ds.n_classes()), (n, d, c), "{}", ds.name());
            assert_eq!(ds.n_kind(FeatureKind::Continuous), d);
            ds.check_invariants().unwrap();
        }
    }

    #[test]
    fn reference_table_has_36_rows() {
        assert_eq!(REFERENCE_WINNERS_CSV.lines().count(), 37);
    }
}
