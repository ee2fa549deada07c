use super::preprocess::standardize;
use super::{Dataset, FeatureKind};
use crate::error::{Error, Result};

/// Scaling used before neighborhood statistics: continuous columns are
/// z-scored, binary columns are mapped to -1 (lower value) and +1 (higher).
pub fn neighborhood_scale(ds: &Dataset) -> Result<Dataset> {
    let d = ds.n_features();
    let mut columns: Vec<Vec<f64>> = (0..d).map(|j| ds.column(j).collect()).collect();
    for (j, (col, kind)) in columns.iter_mut().zip(ds.feature_kinds()).enumerate() {
        match kind {
            FeatureKind::Continuous => standardize(col),
            FeatureKind::Binary => {
                let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                if lo == hi || col.iter().any(|&v| v != lo && v != hi) {
                    return Err(Error::data(format!(
                        "binary column {j} does not have exactly two distinct values"
                    )));
                }
                for v in col.iter_mut() {
                    *v = if *v == lo { -1.0 } else { 1.0 };
                }
            }
        }
    }
    let mut features = Vec::with_capacity(ds.features().len());
    for i in 0..ds.n_rows() {
        features.extend(columns.iter().map(|c| c[i]));
    }
    Ok(ds.map_features(features))
}
