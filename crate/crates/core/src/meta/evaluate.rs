use std::fmt::Write as _;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::correlation::pairwise_spearman;
use super::regime::{leave_two_out_splits, RegimeLabel};
use super::MetaFeatureMatrix;
use crate::data::DataView;
use crate::error::{Error, Result};
use crate::experiment::DEFAULT_BR_VALUES;
use crate::forest::{fit_forest_on, named_config, named_configs, ForestConfig};
use crate::rng::{derive_seed, name_hash};

/// Grid of the meta-classifier experiment: every (config, rate, feature
/// count) triple is scored over all leave-two-out splits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaGrid {
    pub configs: Vec<ForestConfig>,
    pub br_values: Vec<f64>,
    /// Feature counts 1..=max_features are tried.
    pub max_features: usize,
    pub seed: u64,
}

impl Default for MetaGrid {
    /// `RF(base)` only; see [`MetaGrid::full`] for all eighteen.
    fn default() -> Self {
        Self {
            configs: vec![named_config("RF(base)").expect("base config exists")],
            br_values: DEFAULT_BR_VALUES.to_vec(),
            max_features: 10,
            seed: 0,
        }
    }
}

impl MetaGrid {
    pub fn full() -> Self {
        Self {
            configs: named_configs(),
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaCell {
    pub config: String,
    pub br: f64,
    pub n_features: usize,
    /// Mean over splits of the fraction of the two held-out datasets
    /// classified correctly.
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaExperimentReport {
    pub n_datasets: usize,
    pub n_splits: usize,
    /// In (config, rate, feature count) order.
    pub cells: Vec<MetaCell>,
}

impl MetaExperimentReport {
    /// Highest-accuracy cell; the first in grid order on ties.
    pub fn best(&self) -> Option<&MetaCell> {
        self.cells
            .iter()
            .fold(None, |best: Option<&MetaCell>, c| match best {
                Some(b) if b.accuracy >= c.accuracy => Some(b),
                _ => Some(c),
            })
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["config", "br", "n_features", "accuracy"])?;
        for c in &self.cells {
            w.write_record([
                c.config.clone(),
                format!("{:?}", c.br),
                c.n_features.to_string(),
                format!("{:?}", c.accuracy),
            ])?;
        }
        w.flush().map_err(|e| Error::Csv(e.into()))?;
        Ok(())
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} datasets, {} train/validation splits", self.n_datasets, self.n_splits);
        if let Some(b) = self.best() {
            let _ = writeln!(
                s,
                "best: {} br={} features={} accuracy={:.2}%",
                b.config,
                b.br,
                b.n_features,
                100.0 * b.accuracy
            );
        }
        s
    }
}

/// Indices of the `k` features with the largest |Spearman| against the
/// labels, computed on `train` rows only. Undefined coefficients are
/// skipped; equal magnitudes go to the lower feature index.
pub fn select_features(matrix: &MetaFeatureMatrix, labels: &[RegimeLabel], train: &[usize], k: usize) -> Vec<usize> {
    let y: Vec<f64> = train.iter().map(|&i| labels[i].class_id() as f64).collect();
    let mut scored: Vec<(f64, usize)> = (0..matrix.n_features())
        .into_par_iter()
        .filter_map(|j| {
            let x: Vec<Option<f64>> = train.iter().map(|&i| matrix.rows[i][j]).collect();
            pairwise_spearman(&x, &y).map(|r| (r.abs(), j))
        })
        .collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    scored.into_iter().take(k).map(|(_, j)| j).collect()
}

/// Dense row-major matrix of the chosen features; undefined cells take the
/// mean of the feature's defined training values.
fn design_matrix(matrix: &MetaFeatureMatrix, features: &[usize], train: &[usize], rows: &[usize]) -> Vec<f64> {
    let means: Vec<f64> = features
        .iter()
        .map(|&j| {
            let vals: Vec<f64> = train.iter().filter_map(|&i| matrix.rows[i][j]).collect();
            vals.iter().sum::<f64>() / vals.len() as f64
        })
        .collect();
    rows.iter()
        .flat_map(|&i| {
            features
                .iter()
                .zip(&means)
                .map(move |(&j, &m)| matrix.rows[i][j].unwrap_or(m))
        })
        .collect()
}

/// Leave-two-out evaluation of forests that predict the regime label from
/// the top-k correlated meta-features. Feature ranking and imputation use
/// only the training rows of each split.
pub fn meta_evaluate(
    matrix: &MetaFeatureMatrix,
    labels: &[RegimeLabel],
    grid: &MetaGrid,
) -> Result<MetaExperimentReport> {
    if labels.len() != matrix.n_datasets() {
        return Err(Error::Dimension {
            expected: matrix.n_datasets(),
            found: labels.len(),
        });
    }
    let n_gt = labels.iter().filter(|&&l| l == RegimeLabel::GT1).count();
    if n_gt < 2 || labels.len() - n_gt < 2 {
        return Err(Error::invalid("meta evaluation needs at least two datasets of each regime"));
    }
    if grid.max_features == 0 || grid.configs.is_empty() || grid.br_values.is_empty() {
        return Err(Error::invalid("meta grid is empty"));
    }
    for c in &grid.configs {
        c.validate()?;
    }
    let splits = leave_two_out_splits(labels)?;
    let class_ids: Vec<usize> = labels.iter().map(|l| l.class_id()).collect();
    let (nc, nb, nk) = (grid.configs.len(), grid.br_values.len(), grid.max_features);

    // correct[c][b][k - 1] summed over the split's two validation rows
    let per_split: Vec<Vec<u32>> = splits
        .par_iter()
        .enumerate()
        .map(|(s, split)| -> Result<Vec<u32>> {
            let ranking = select_features(matrix, labels, &split.train, nk);
            let mut correct = vec![0u32; nc * nb * nk];
            let all: Vec<usize> = split.train.iter().chain(&split.validation).copied().collect();
            let y: Vec<usize> = all.iter().map(|&i| class_ids[i]).collect();
            let train_idx: Vec<usize> = (0..split.train.len()).collect();
            for k in 1..=nk {
                // fewer usable features than k: reuse the largest available set
                let features = &ranking[..k.min(ranking.len())];
                if features.is_empty() {
                    continue;
                }
                let x = design_matrix(matrix, features, &split.train, &all);
                let view = DataView::new(&x, features.len(), &y, 2)?;
                for (c, config) in grid.configs.iter().enumerate() {
                    for (b, &br) in grid.br_values.iter().enumerate() {
                        let cfg = ForestConfig {
                            bootstrap_rate: br,
                            seed: derive_seed(
                                grid.seed,
                                &[name_hash(&config.name), br.to_bits(), s as u64, k as u64],
                            ),
                            ..config.clone()
                        };
                        let rf = fit_forest_on(view, &train_idx, &cfg)?;
                        let held_out = [split.train.len(), split.train.len() + 1];
                        let predicted = rf.predict_labels(view, &held_out);
                        correct[(c * nb + b) * nk + k - 1] +=
                            held_out.iter().zip(&predicted).filter(|(&r, &p)| y[r] == p).count() as u32;
                    }
                }
            }
            Ok(correct)
        })
        .collect::<Result<_>>()?;

    let n_splits = splits.len();
    let mut cells = Vec::with_capacity(nc * nb * nk);
    for (c, config) in grid.configs.iter().enumerate() {
        for (b, &br) in grid.br_values.iter().enumerate() {
            for k in 1..=nk {
                let i = (c * nb + b) * nk + k - 1;
                let total: u32 = per_split.iter().map(|v| v[i]).sum();
                cells.push(MetaCell {
                    config: config.name.clone(),
                    br,
                    n_features: k,
                    accuracy: f64::from(total) / (2.0 * n_splits as f64),
                });
            }
        }
    }
    Ok(MetaExperimentReport {
        n_datasets: labels.len(),
        n_splits,
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use rand::Rng;

    /// Column 0 is noise, column 1 equals the label, column 2 is noise with
    /// some undefined cells.
    fn fixture(n: usize) -> (MetaFeatureMatrix, Vec<RegimeLabel>) {
        let mut r = rng::stream(4, &[]);
        let labels: Vec<RegimeLabel> = (0..n)
            .map(|i| if i % 2 == 0 { RegimeLabel::GT1 } else { RegimeLabel::LE1 })
            .collect();
        let rows = labels
            .iter()
            .enumerate()
            .map(|(i, l)| {
                vec![
                    Some(r.random::<f64>()),
                    Some(l.class_id() as f64),
                    if i % 4 == 1 { None } else { Some(r.random::<f64>()) },
                ]
            })
            .collect();
        let m = MetaFeatureMatrix {
            datasets: (0..n).map(|i| format!("d{i}")).collect(),
            names: vec!["noise".into(), "label".into(), "gappy".into()],
            rows,
        };
        (m, labels)
    }

    fn small_grid() -> MetaGrid {
        MetaGrid {
            configs: vec![named_config("RF(base)").unwrap().with_trees(10), named_config("RF(ml_2)").unwrap().with_trees(10)],
            br_values: vec![0.6, 2.0],
            max_features: 2,
            seed: 1,
        }
    }

    #[test]
    fn label_feature_is_ranked_first() {
        let (m, labels) = fixture(12);
        let train: Vec<usize> = (2..12).collect();
        assert_eq!(select_features(&m, &labels, &train, 1), vec![1]);
    }

    #[test]
    fn label_feature_gives_perfect_accuracy_at_k1() {
        let (m, labels) = fixture(16);
        let report = meta_evaluate(&m, &labels, &small_grid()).unwrap();
        assert_eq!(report.n_splits, 8 * 8);
        assert_eq!(report.cells.len(), 2 * 2 * 2);
        for cell in report.cells.iter().filter(|c| c.n_features == 1) {
            assert_eq!(cell.accuracy, 1.0, "{cell:?}");
        }
        let best = report.best().unwrap();
        assert_eq!(best.accuracy, 1.0);
        assert_eq!((best.config.as_str(), best.n_features), ("RF(base)", 1));
        assert!(report.summary().contains("64 train/validation splits"));
    }

    #[test]
    fn selection_ignores_validation_rows() {
        let (m, labels) = fixture(12);
        let train: Vec<usize> = (0..10).collect();
        let before = select_features(&m, &labels, &train, 3);
        let mut shuffled = m.clone();
        shuffled.rows.swap(10, 11);
        shuffled.rows[10] = vec![Some(-5.0), Some(99.0), None];
        assert_eq!(select_features(&shuffled, &labels, &train, 3), before);
    }

    #[test]
    fn imputation_uses_training_mean() {
        let m = MetaFeatureMatrix {
            datasets: vec!["a".into(), "b".into(), "c".into()],
            names: vec!["f".into()],
            rows: vec![vec![Some(1.0)], vec![Some(3.0)], vec![None]],
        };
        assert_eq!(design_matrix(&m, &[0], &[0, 1], &[2, 0]), vec![2.0, 1.0]);
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let (m, labels) = fixture(10);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| meta_evaluate(&m, &labels, &small_grid()).unwrap())
        };
        assert_eq!(run(1), run(3));
    }

    #[test]
    fn needs_two_of_each_regime() {
        let (m, mut labels) = fixture(6);
        labels.iter_mut().for_each(|l| *l = RegimeLabel::LE1);
        labels[0] = RegimeLabel::GT1;
        assert!(meta_evaluate(&m, &labels, &small_grid()).is_err());
    }
}
