//! Repeated stratified two-fold cross-validation over a (configuration,
//! bootstrap rate) grid, and the reports derived from it.
//!
//! Every cell of the grid sees the same train/test split for a given repeat,
//! so accuracy vectors of two cells can be compared with a paired test
//! position by position.

mod io;
mod plot;
mod report;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{stratified_two_fold, Dataset, FoldAssignment};
use crate::error::{Error, Result};
use crate::forest::{fit_forest_on, named_configs, ForestConfig};
use crate::rng::{derive_seed, name_hash};

pub use io::{
    read_grid_csv, read_grid_rows, read_winners_csv, write_grid_csv, write_grid_rows, write_winners_csv,
    GridRow,
};
pub use plot::render_curves_svg;
pub use report::{
    analyze, br_curves, format_histogram, format_winners_table, per_config_winners, select_winner,
    significance_analysis, winning_br_histogram, BrCurve, WinnerReport,
};

pub const DEFAULT_BR_VALUES: [f64; 10] = [0.2, 0.4, 0.6, 0.8, 1.0, 1.2, 2.0, 3.0, 4.0, 5.0];
pub const DESK_REPEATS: usize = 20;
pub const FULL_REPEATS: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub configs: Vec<ForestConfig>,
    pub br_values: Vec<f64>,
    pub repeats: usize,
    pub seed: u64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            configs: named_configs(),
            br_values: DEFAULT_BR_VALUES.to_vec(),
            repeats: DESK_REPEATS,
            seed: 0,
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.configs.is_empty() {
            return Err(Error::invalid("grid needs at least one configuration"));
        }
        if self.repeats == 0 {
            return Err(Error::invalid("repeats must be at least 1"));
        }
        if self.br_values.is_empty() {
            return Err(Error::invalid("grid needs at least one bootstrap rate"));
        }
        if self.br_values.iter().any(|&b| !(b > 0.0 && b.is_finite())) {
            return Err(Error::invalid("bootstrap rates must be positive and finite"));
        }
        if self.br_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("bootstrap rates must be strictly increasing"));
        }
        let mut names: Vec<&str> = self.configs.iter().map(|c| c.name.as_str()).collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("configuration names must be unique"));
        }
        for c in &self.configs {
            c.validate()?;
        }
        Ok(())
    }

    /// Folds for every repeat; shared by all cells.
    pub fn folds(&self, ds: &Dataset) -> Vec<FoldAssignment> {
        (0..self.repeats as u64)
            .map(|r| stratified_two_fold(ds, r, self.seed))
            .collect()
    }

    /// Forest seed for one (config, rate, repeat, test fold) cell. Depends on
    /// the config name and the rate value rather than their grid positions,
    /// so a sub-grid reproduces the matching cells of a larger grid.
    pub fn cell_seed(&self, config: &ForestConfig, br: f64, repeat: usize, fold: u8) -> u64 {
        derive_seed(
            self.seed,
            &[name_hash(&config.name), br.to_bits(), repeat as u64, u64::from(fold)],
        )
    }
}

/// Accuracies of the two folds of one repeat: element `f` is the accuracy
/// on fold `f` of the forest trained on the other fold.
pub fn evaluate_cell(
    ds: &Dataset,
    folds: &FoldAssignment,
    spec: &GridSpec,
    config: &ForestConfig,
    br: f64,
    repeat: usize,
) -> Result<[f64; 2]> {
    let parts = [folds.indices(0), folds.indices(1)];
    let mut out = [0.0; 2];
    for test in 0..2u8 {
        let train = &parts[1 - test as usize];
        let cfg = ForestConfig {
            bootstrap_rate: br,
            seed: spec.cell_seed(config, br, repeat, test),
            ..config.clone()
        };
        let rf = fit_forest_on(ds.view(), train, &cfg)?;
        out[test as usize] = rf.accuracy(ds.view(), &parts[test as usize]);
    }
    Ok(out)
}

/// Accuracy table indexed by (config, rate, repeat, fold).
#[derive(Debug, Clone, PartialEq)]
pub struct GridResult {
    pub dataset: String,
    pub config_names: Vec<String>,
    pub br_values: Vec<f64>,
    pub repeats: usize,
    accuracies: Vec<f64>,
}

impl GridResult {
    pub fn new(
        dataset: impl Into<String>,
        config_names: Vec<String>,
        br_values: Vec<f64>,
        repeats: usize,
        accuracies: Vec<f64>,
    ) -> Result<Self> {
        let expected = config_names.len() * br_values.len() * repeats * 2;
        if accuracies.len() != expected {
            return Err(Error::Dimension {
                expected,
                found: accuracies.len(),
            });
        }
        if accuracies.iter().any(|a| !(0.0..=1.0).contains(a)) {
            return Err(Error::data("accuracies must lie in [0, 1]"));
        }
        Ok(Self {
            dataset: dataset.into(),
            config_names,
            br_values,
            repeats,
            accuracies,
        })
    }

    pub fn n_configs(&self) -> usize {
        self.config_names.len()
    }

    pub fn n_rates(&self) -> usize {
        self.br_values.len()
    }

    fn offset(&self, config: usize, rate: usize) -> usize {
        (config * self.br_values.len() + rate) * self.repeats * 2
    }

    /// The `2 * repeats` accuracies of a cell, ordered by (repeat, fold).
    pub fn cell(&self, config: usize, rate: usize) -> &[f64] {
        let o = self.offset(config, rate);
        &self.accuracies[o..o + self.repeats * 2]
    }

    pub fn accuracy(&self, config: usize, rate: usize, repeat: usize, fold: usize) -> f64 {
        self.accuracies[self.offset(config, rate) + repeat * 2 + fold]
    }

    /// Unweighted mean of the fold accuracies of a cell.
    pub fn mean(&self, config: usize, rate: usize) -> f64 {
        let c = self.cell(config, rate);
        c.iter().sum::<f64>() / c.len() as f64
    }

    pub fn config_index(&self, name: &str) -> Option<usize> {
        self.config_names.iter().position(|n| n == name)
    }

    pub fn rate_index(&self, br: f64) -> Option<usize> {
        self.br_values.iter().position(|&b| b == br)
    }

    pub fn rows(&self) -> impl Iterator<Item = GridRow> + '_ {
        let nb = self.br_values.len();
        self.accuracies.iter().enumerate().map(move |(i, &accuracy)| {
            let fold = i % 2;
            let repeat = (i / 2) % self.repeats;
            let rate = (i / (2 * self.repeats)) % nb;
            let config = i / (2 * self.repeats * nb);
            GridRow {
                dataset: self.dataset.clone(),
                config: self.config_names[config].clone(),
                br: self.br_values[rate],
                repeat,
                fold: fold as u8,
                accuracy,
            }
        })
    }

    /// Rebuilds a grid from keyed rows. Configs keep first-seen order, rates
    /// are sorted ascending, and every cell must be present exactly once.
    pub fn from_rows(rows: &[GridRow]) -> Result<Self> {
        let first = rows.first().ok_or_else(|| Error::data("no grid rows"))?;
        let dataset = first.dataset.clone();
        let mut config_names: Vec<String> = Vec::new();
        let mut br_values: Vec<f64> = Vec::new();
        let mut repeats = 0;
        for r in rows {
            if r.dataset != dataset {
                return Err(Error::data(format!(
                    "rows mix datasets `{dataset}` and `{}`",
                    r.dataset
                )));
            }
            if !config_names.contains(&r.config) {
                config_names.push(r.config.clone());
            }
            if !br_values.contains(&r.br) {
                br_values.push(r.br);
            }
            repeats = repeats.max(r.repeat + 1);
        }
        br_values.sort_by(f64::total_cmp);
        let mut acc = vec![f64::NAN; config_names.len() * br_values.len() * repeats * 2];
        let nb = br_values.len();
        for r in rows {
            let c = config_names.iter().position(|n| *n == r.config).unwrap_or_default();
            let b = br_values.iter().position(|&v| v == r.br).unwrap_or_default();
            if r.fold > 1 {
                return Err(Error::data(format!("fold {} out of range", r.fold)));
            }
            let i = ((c * nb + b) * repeats + r.repeat) * 2 + r.fold as usize;
            if !acc[i].is_nan() {
                return Err(Error::data(format!(
                    "duplicate cell {} br={} repeat={} fold={}",
                    r.config, r.br, r.repeat, r.fold
                )));
            }
            acc[i] = r.accuracy;
        }
        if let Some(missing) = acc.iter().position(|a| a.is_nan()) {
            let per_config = nb * repeats * 2;
            return Err(Error::data(format!(
                "grid for `{dataset}` is incomplete: no value for {} br={} repeat={} fold={}",
                config_names[missing / per_config],
                br_values[(missing / (repeats * 2)) % nb],
                (missing / 2) % repeats,
                missing % 2
            )));
        }
        Self::new(dataset, config_names, br_values, repeats, acc)
    }
}

/// Evaluates every (config, rate, repeat) triple; cells run in parallel and
/// the result is independent of the thread count.
pub fn run_grid(ds: &Dataset, spec: &GridSpec) -> Result<GridResult> {
    spec.validate()?;
    let folds = spec.folds(ds);
    let nb = spec.br_values.len();
    let tasks: Vec<(usize, usize, usize)> = (0..spec.configs.len())
        .flat_map(|c| (0..nb).flat_map(move |b| (0..spec.repeats).map(move |r| (c, b, r))))
        .collect();
    let pairs = tasks
        .par_iter()
        .map(|&(c, b, r)| evaluate_cell(ds, &folds[r], spec, &spec.configs[c], spec.br_values[b], r))
        .collect::<Result<Vec<[f64; 2]>>>()?;
    GridResult::new(
        ds.name(),
        spec.configs.iter().map(|c| c.name.clone()).collect(),
        spec.br_values.clone(),
        spec.repeats,
        pairs.into_iter().flatten().collect(),
    )
}

/// Evaluates only the (config, rate, repeat) triples for which `skip`
/// returns false, returning their rows in grid order. Used to resume
/// partially written grids.
pub fn run_grid_missing(
    ds: &Dataset,
    spec: &GridSpec,
    skip: impl Fn(&str, f64, usize) -> bool + Sync,
) -> Result<Vec<GridRow>> {
    spec.validate()?;
    let folds = spec.folds(ds);
    let tasks: Vec<(usize, usize, usize)> = (0..spec.configs.len())
        .flat_map(|c| (0..spec.br_values.len()).flat_map(move |b| (0..spec.repeats).map(move |r| (c, b, r))))
        .filter(|&(c, b, r)| !skip(&spec.configs[c].name, spec.br_values[b], r))
        .collect();
    let pairs = tasks
        .par_iter()
        .map(|&(c, b, r)| evaluate_cell(ds, &folds[r], spec, &spec.configs[c], spec.br_values[b], r))
        .collect::<Result<Vec<[f64; 2]>>>()?;
    Ok(tasks
        .iter()
        .zip(pairs)
        .flat_map(|(&(c, b, r), acc)| {
            (0..2u8).map(move |fold| GridRow {
                dataset: ds.name().to_owned(),
                config: spec.configs[c].name.clone(),
                br: spec.br_values[b],
                repeat: r,
                fold,
                accuracy: acc[fold as usize],
            })
        })
        .collect())
}
