use std::collections::{BTreeSet, HashMap, HashSet};

use super::table::{ColumnValues, RawTable};
use super::{Dataset, FeatureKind};
use crate::error::{Error, Result};

const MISSING_CATEGORY: &str = "__missing__";

#[derive(Clone, PartialEq, Eq, Hash)]
enum CellKey<'a> {
    Missing,
    Number(u64),
    Text(&'a str),
}

fn cell_key(values: &ColumnValues, i: usize) -> CellKey<'_> {
    match values {
        ColumnValues::Numerical(v) => v[i].map_or(CellKey::Missing, |x| CellKey::Number((x + 0.0).to_bits())),
        ColumnValues::Categorical(v) => v[i].as_deref().map_or(CellKey::Missing, CellKey::Text),
    }
}

/// Runs the encoding pipeline, in this order:
///
/// 1. drop duplicate rows (exact equality of raw cells and label),
/// 2. drop rows whose class occurs only once,
/// 3. drop columns with at most one distinct non-missing value,
/// 4. replace missing categorical cells with a dedicated category,
/// 5. impute missing numerical cells with the column mean,
/// 6. one-hot encode categorical columns,
/// 7. z-score every column with the population standard deviation.
///
/// One-hot columns and numerical columns with exactly two distinct values
/// are tagged [`FeatureKind::Binary`]; the rest are continuous. Class ids
/// follow the sorted order of the original labels (numeric order when every
/// label parses as a number).
pub fn preprocess(raw: &RawTable, name: &str) -> Result<Dataset> {
    let n = raw.n_rows();
    if raw.columns.iter().any(|c| c.values.len() != n) {
        return Err(Error::data("columns have differing lengths"));
    }

    // 1. duplicates
    let mut seen = HashSet::with_capacity(n);
    let mut rows: Vec<usize> = (0..n)
        .filter(|&i| {
            let key: (Vec<CellKey<'_>>, &str) = (
                raw.columns.iter().map(|c| cell_key(&c.values, i)).collect(),
                raw.labels[i].as_str(),
            );
            seen.insert(key)
        })
        .collect();

    // 2. singleton classes
    let mut label_counts: HashMap<&str, usize> = HashMap::new();
    for &i in &rows {
        *label_counts.entry(raw.labels[i].as_str()).or_default() += 1;
    }
    rows.retain(|&i| label_counts[raw.labels[i].as_str()] >= 2);

    let class_names = sorted_labels(rows.iter().map(|&i| raw.labels[i].as_str()));
    if rows.len() < 2 || class_names.len() < 2 {
        return Err(Error::Degenerate(format!(
            "{} rows and {} classes remain",
            rows.len(),
            class_names.len()
        )));
    }
    let class_id: HashMap<&str, usize> = class_names
        .iter()
        .enumerate()
        .map(|(id, c)| (c.as_str(), id))
        .collect();
    let labels: Vec<usize> = rows.iter().map(|&i| class_id[raw.labels[i].as_str()]).collect();

    // 3-6: build encoded columns
    let mut columns: Vec<Vec<f64>> = Vec::new();
    let mut kinds = Vec::new();
    let mut names = Vec::new();
    for col in &raw.columns {
        let distinct: HashSet<CellKey<'_>> = rows
            .iter()
            .map(|&i| cell_key(&col.values, i))
            .filter(|k| *k != CellKey::Missing)
            .collect();
        if distinct.len() <= 1 {
            continue;
        }
        match &col.values {
            ColumnValues::Numerical(v) => {
                let present: Vec<f64> = rows.iter().filter_map(|&i| v[i]).collect();
                let mean = present.iter().sum::<f64>() / present.len() as f64;
                let filled: Vec<f64> = rows.iter().map(|&i| v[i].unwrap_or(mean)).collect();
                let kind = if n_distinct(&filled) == 2 {
                    FeatureKind::Binary
                } else {
                    FeatureKind::Continuous
                };
                columns.push(filled);
                kinds.push(kind);
                names.push(col.name.clone());
            }
            ColumnValues::Categorical(v) => {
                let cell = |i: usize| v[i].as_deref().unwrap_or(MISSING_CATEGORY);
                let categories: BTreeSet<&str> = rows.iter().map(|&i| cell(i)).collect();
                for cat in categories {
                    columns.push(
                        rows.iter()
                            .map(|&i| if cell(i) == cat { 1.0 } else { 0.0 })
                            .collect(),
                    );
                    kinds.push(FeatureKind::Binary);
                    names.push(format!("{}={}", col.name, cat));
                }
            }
        }
    }
    if columns.is_empty() {
        return Err(Error::Degenerate("no non-constant feature columns".into()));
    }

    // 7. standardize
    for col in &mut columns {
        standardize(col);
    }

    let n_features = columns.len();
    let mut features = Vec::with_capacity(rows.len() * n_features);
    for r in 0..rows.len() {
        features.extend(columns.iter().map(|c| c[r]));
    }
    Dataset::new(name, features, n_features, kinds, labels, class_names)?.with_feature_names(names)
}

fn n_distinct(values: &[f64]) -> usize {
    values
        .iter()
        .map(|v| (v + 0.0).to_bits())
        .collect::<HashSet<_>>()
        .len()
}

/// In-place z-score with the population standard deviation. Constant input
/// is only centered.
pub(crate) fn standardize(col: &mut [f64]) {
    let n = col.len() as f64;
    let mean = col.iter().sum::<f64>() / n;
    let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let std = var.sqrt();
    for v in col.iter_mut() {
        *v -= mean;
        if std > 0.0 {
            *v /= std;
        }
    }
}

fn sorted_labels<'a>(labels: impl Iterator<Item = &'a str>) -> Vec<String> {
    let set: BTreeSet<&str> = labels.collect();
    let mut out: Vec<String> = set.into_iter().map(str::to_owned).collect();
    let numeric: Option<Vec<f64>> = out.iter().map(|s| s.parse::<f64>().ok()).collect();
    if let Some(keys) = numeric {
        let mut paired: Vec<(f64, String)> = keys.into_iter().zip(out).collect();
        paired.sort_by(|a, b| a.0.total_cmp(&b.0));
        out = paired.into_iter().map(|(_, s)| s).collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::table::{parse_csv, LoadOptions};

    fn run(text: &str) -> Result<Dataset> {
        let raw = parse_csv(text.as_bytes(), "class", &LoadOptions::default())?;
        preprocess(&raw, "t")
    }

    #[test]
    fn constant_column_is_dropped() {
        let ds = run("a,k,class\n1,x,p\n2,x,q\n3,x,p\n4,x,q\n").unwrap();
        assert_eq!(ds.n_features(), 1);
        assert_eq!(ds.feature_names(), &["a"]);
    }

    #[test]
    fn duplicates_then_singletons_removed() {
        // row 2 duplicates row 1; class r appears once
        let ds = run("a,class\n1,p\n1,p\n2,p\n3,q\n4,q\n5,r\n").unwrap();
        assert_eq!(ds.n_rows(), 4);
        assert_eq!(ds.n_classes(), 2);
        assert_eq!(ds.class_names(), &["p", "q"]);
    }

    #[test]
    fn duplicate_detection_includes_label() {
        let ds = run("a,b,class\n1,0,p\n1,0,q\n2,1,p\n3,1,q\n").unwrap();
        assert_eq!(ds.n_rows(), 4);
    }

    #[test]
    fn missing_values_are_imputed_and_one_hot_encoded() {
        let ds = run("num,cat,class\n1,a,p\n?,b,p\n3,?,q\n5,a,q\n").unwrap();
        // num + cat={__missing__, a, b}
        assert_eq!(ds.n_features(), 4);
        assert_eq!(
            ds.feature_names(),
            &["num", "cat=__missing__", "cat=a", "cat=b"]
        );
        assert_eq!(ds.n_kind(FeatureKind::Binary), 3);
        // mean of {1,3,5} = 3 imputed, so standardized value of row 1 equals row 2's
        assert_eq!(ds.row(1)[0], ds.row(2)[0]);
    }

    #[test]
    fn columns_are_standardized() {
        let ds = run("a,b,class\n1,10,p\n2,20,p\n3,0,q\n4,50,q\n").unwrap();
        for j in 0..ds.n_features() {
            let col: Vec<f64> = ds.column(j).collect();
            let mean = col.iter().sum::<f64>() / col.len() as f64;
            let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / col.len() as f64;
            assert!(mean.abs() < 1e-12);
            assert!((var - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn two_valued_numeric_column_is_binary() {
        let ds = run("flag,v,class\n0,1.5,p\n1,2.5,p\n0,3.5,q\n1,0.5,q\n").unwrap();
        assert_eq!(ds.feature_kinds(), &[FeatureKind::Binary, FeatureKind::Continuous]);
    }

    #[test]
    fn numeric_labels_sort_numerically() {
        let ds = run("a,class\n1,10\n2,10\n3,2\n4,2\n").unwrap();
        assert_eq!(ds.class_names(), &["2", "10"]);
        assert_eq!(ds.labels(), &[1, 1, 0, 0]);
    }

    #[test]
    fn degenerate_tables_fail() {
        assert!(matches!(run("a,class\n1,p\n2,p\n3,q\n"), Err(Error::Degenerate(_))));
        assert!(matches!(run("a,class\n1,p\n1,p\n"), Err(Error::Degenerate(_))));
    }

    #[test]
    fn output_satisfies_invariants() {
        let ds = run("a,b,c,class\n1,x,5,p\n2,y,5,p\n3,x,5,q\n4,?,5,q\n4,?,5,q\n9,z,5,r\n").unwrap();
        ds.check_invariants().unwrap();
    }
}
