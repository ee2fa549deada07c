use std::io::Write;

use rayon::prelude::*;

use super::MetaFeatureMatrix;
use crate::error::{Error, Result};
use crate::experiment::{per_config_winners, select_winner, GridResult};
use crate::stats::spearman_rho;

/// Fewest complete (feature, target) pairs for which a coefficient is reported.
pub const MIN_PAIRS: usize = 3;

/// Spearman correlation over the rows where `x` is defined. `None` when
/// fewer than [`MIN_PAIRS`] rows remain or either side is constant.
pub fn pairwise_spearman(x: &[Option<f64>], y: &[f64]) -> Option<f64> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = x
        .iter()
        .zip(y)
        .filter_map(|(a, &b)| a.map(|a| (a, b)))
        .unzip();
    if xs.len() < MIN_PAIRS {
        return None;
    }
    spearman_rho(&xs, &ys).ok()
}

/// Spearman coefficients of every feature against every target.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationTable {
    pub features: Vec<String>,
    pub targets: Vec<String>,
    /// `rho[feature][target]`; `None` where undefined.
    pub rho: Vec<Vec<Option<f64>>>,
}

/// `targets` are (name, one value per matrix row) pairs, e.g. each
/// dataset's best bootstrap rate overall and per configuration.
pub fn correlation_table(matrix: &MetaFeatureMatrix, targets: &[(String, Vec<f64>)]) -> Result<CorrelationTable> {
    if matrix.n_datasets() < MIN_PAIRS {
        return Err(Error::invalid(format!(
            "correlation table needs at least {MIN_PAIRS} datasets, got {}",
            matrix.n_datasets()
        )));
    }
    if let Some((name, v)) = targets.iter().find(|(_, v)| v.len() != matrix.n_datasets()) {
        return Err(Error::invalid(format!(
            "target `{name}` has {} values for {} datasets",
            v.len(),
            matrix.n_datasets()
        )));
    }
    let rho = (0..matrix.n_features())
        .into_par_iter()
        .map(|j| {
            let col = matrix.column(j);
            targets.iter().map(|(_, y)| pairwise_spearman(&col, y)).collect()
        })
        .collect();
    Ok(CorrelationTable {
        features: matrix.names.clone(),
        targets: targets.iter().map(|(n, _)| n.clone()).collect(),
        rho,
    })
}

/// Best rate per dataset: overall (`best`) and for each configuration.
/// All grids must contain the configurations of the first one.
pub fn best_rate_targets(grids: &[GridResult]) -> Result<Vec<(String, Vec<f64>)>> {
    let first = grids.first().ok_or_else(|| Error::invalid("no grid results"))?;
    let mut out = vec![("best".to_owned(), grids.iter().map(|g| select_winner(g).best_br).collect())];
    for name in &first.config_names {
        let mut col = Vec::with_capacity(grids.len());
        for g in grids {
            let c = g.config_index(name).ok_or_else(|| {
                Error::data(format!("grid for `{}` lacks configuration {name}", g.dataset))
            })?;
            col.push(per_config_winners(g)[c].best_br);
        }
        out.push((name.clone(), col));
    }
    Ok(out)
}

impl CorrelationTable {
    /// Features sorted by decreasing coefficient for one target, undefined
    /// coefficients last.
    pub fn ranked(&self, target: usize) -> Vec<(&str, Option<f64>)> {
        let mut v: Vec<(&str, Option<f64>)> = self
            .features
            .iter()
            .zip(&self.rho)
            .map(|(f, r)| (f.as_str(), r[target]))
            .collect();
        v.sort_by(|a, b| match (a.1, b.1) {
            (Some(x), Some(y)) => y.total_cmp(&x),
            (Some(_), None) => std::cmp::Ordering::Less,
            (None, Some(_)) => std::cmp::Ordering::Greater,
            (None, None) => std::cmp::Ordering::Equal,
        });
        v
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(std::iter::once("feature").chain(self.targets.iter().map(String::as_str)))?;
        for (f, row) in self.features.iter().zip(&self.rho) {
            let cells = row.iter().map(|r| r.map(|x| format!("{x:?}")).unwrap_or_default());
            w.write_record(std::iter::once(f.clone()).chain(cells))?;
        }
        w.flush().map_err(|e| Error::Csv(e.into()))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn matrix(cols: Vec<Vec<Option<f64>>>) -> MetaFeatureMatrix {
        let n = cols[0].len();
        MetaFeatureMatrix {
            datasets: (0..n).map(|i| format!("d{i}")).collect(),
            names: (0..cols.len()).map(|j| format!("f{j}")).collect(),
            rows: (0..n).map(|i| cols.iter().map(|c| c[i]).collect()).collect(),
        }
    }

    #[test]
    fn identical_ranks_give_one_and_constants_are_undefined() {
        let y = vec![0.2, 5.0, 1.0, 3.0];
        let m = matrix(vec![
            vec![Some(1.0), Some(9.0), Some(2.0), Some(4.0)],
            vec![Some(7.0); 4],
            vec![None, Some(9.0), Some(2.0), None],
        ]);
        let t = correlation_table(&m, &[("best".into(), y)]).unwrap();
        assert!((t.rho[0][0].unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(t.rho[1][0], None);
        assert_eq!(t.rho[2][0], None);
        assert_eq!(t.ranked(0)[0].0, "f0");
    }

    #[test]
    fn missing_cells_are_excluded_pairwise() {
        let x = [Some(1.0), None, Some(2.0), Some(3.0)];
        let y = [1.0, -100.0, 2.0, 3.0];
        assert!((pairwise_spearman(&x, &y).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn too_few_datasets_is_an_error() {
        let m = matrix(vec![vec![Some(1.0), Some(2.0)]]);
        assert!(correlation_table(&m, &[("t".into(), vec![1.0, 2.0])]).is_err());
    }

    /// Independent oracle: Spearman via explicit rank-difference formula on
    /// tie-free data, `1 - 6 sum d^2 / (n (n^2 - 1))`.
    fn rank_diff_oracle(x: &[f64], y: &[f64]) -> f64 {
        let rank = |v: &[f64]| -> Vec<f64> {
            v.iter()
                .map(|a| 1.0 + v.iter().filter(|b| *b < a).count() as f64)
                .collect()
        };
        let (rx, ry) = (rank(x), rank(y));
        let n = x.len() as f64;
        let d2: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - b).powi(2)).sum();
        1.0 - 6.0 * d2 / (n * (n * n - 1.0))
    }

    proptest! {
        #[test]
        fn matches_rank_difference_oracle(perm_x in Just((0..10).collect::<Vec<usize>>()).prop_shuffle(),
                                          perm_y in Just((0..10).collect::<Vec<usize>>()).prop_shuffle()) {
            let x: Vec<f64> = perm_x.iter().map(|&v| v as f64 * 1.5 - 3.0).collect();
            let y: Vec<f64> = perm_y.iter().map(|&v| (v as f64).exp()).collect();
            let m = matrix(vec![x.iter().map(|&v| Some(v)).collect()]);
            let t = correlation_table(&m, &[("t".into(), y.clone())]).unwrap();
            prop_assert!((t.rho[0][0].unwrap() - rank_diff_oracle(&x, &y)).abs() < 1e-12);
        }
    }
}
