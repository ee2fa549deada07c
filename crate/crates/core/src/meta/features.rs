use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::kl::{kl_names, KLStats, N_KL};
use crate::error::{Error, Result};

/// Number of pairwise and self interactions generated from `n` base features.
pub fn interaction_count(n: usize) -> usize {
    n * (n - 1) / 2 * 6 + 2 * n
}

/// Pairwise and self interactions of named base features.
///
/// For every pair `i < j` (features `f`, `g`): `f/g`, `g/f`, `f-g`, `g-f`,
/// `f*g`, `f+g`; then for every feature `f*f` and `f+f`. A division by zero
/// yields `None`.
pub fn interaction_features(names: &[String], values: &[f64]) -> (Vec<String>, Vec<Option<f64>>) {
    assert_eq!(names.len(), values.len());
    let n = values.len();
    let mut out_names = Vec::with_capacity(interaction_count(n));
    let mut out = Vec::with_capacity(interaction_count(n));
    let div = |a: f64, b: f64| if b == 0.0 { None } else { Some(a / b) };
    for i in 0..n {
        for j in i + 1..n {
            let (f, g) = (values[i], values[j]);
            let (a, b) = (&names[i], &names[j]);
            out_names.extend([
                format!("{a}/{b}"),
                format!("{b}/{a}"),
                format!("{a}-{b}"),
                format!("{b}-{a}"),
                format!("{a}*{b}"),
                format!("{a}+{b}"),
            ]);
            out.extend([div(f, g), div(g, f), Some(f - g), Some(g - f), Some(f * g), Some(f + g)]);
        }
    }
    for (a, &f) in names.iter().zip(values) {
        out_names.extend([format!("{a}*{a}"), format!("{a}+{a}")]);
        out.extend([Some(f * f), Some(f + f)]);
    }
    (out_names, out)
}

/// Which meta-features to include besides the 65 base k_l values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeaturePool {
    /// Base values multiplied by the class count (`k_l*C`).
    pub class_scaled: bool,
    /// Pairwise interactions of the base values.
    pub interactions: bool,
}

impl Default for FeaturePool {
    fn default() -> Self {
        Self {
            class_scaled: false,
            interactions: true,
        }
    }
}

impl FeaturePool {
    pub const BASE: Self = Self {
        class_scaled: false,
        interactions: false,
    };
    pub const ALL: Self = Self {
        class_scaled: true,
        interactions: true,
    };
}

/// One row per dataset; `None` marks an undefined value (division by zero).
#[derive(Debug, Clone, PartialEq)]
pub struct MetaFeatureMatrix {
    pub datasets: Vec<String>,
    pub names: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl MetaFeatureMatrix {
    pub fn build(stats: &[KLStats], pool: FeaturePool) -> Self {
        let base_names = kl_names();
        let mut names = base_names.clone();
        if pool.class_scaled {
            names.extend(base_names.iter().map(|n| format!("{n}*C")));
        }
        if pool.interactions {
            names.extend(interaction_features(&base_names, &vec![0.0; N_KL]).0);
        }
        let rows = stats
            .iter()
            .map(|s| {
                let mut row: Vec<Option<f64>> = s.values.iter().map(|&v| Some(v)).collect();
                if pool.class_scaled {
                    row.extend(s.class_scaled().into_iter().map(Some));
                }
                if pool.interactions {
                    row.extend(interaction_features(&base_names, &s.values).1);
                }
                row
            })
            .collect();
        Self {
            datasets: stats.iter().map(|s| s.dataset.clone()).collect(),
            names,
            rows,
        }
    }

    pub fn n_datasets(&self) -> usize {
        self.rows.len()
    }

    pub fn n_features(&self) -> usize {
        self.names.len()
    }

    pub fn column(&self, j: usize) -> Vec<Option<f64>> {
        self.rows.iter().map(|r| r[j]).collect()
    }

    /// Keeps the rows whose dataset name is listed, in the order given.
    pub fn select_datasets(&self, names: &[String]) -> Result<Self> {
        let rows = names
            .iter()
            .map(|n| {
                self.datasets
                    .iter()
                    .position(|d| d == n)
                    .map(|i| self.rows[i].clone())
                    .ok_or_else(|| Error::data(format!("no meta-features for dataset `{n}`")))
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            datasets: names.to_vec(),
            names: self.names.clone(),
            rows,
        })
    }

    /// CSV with a `dataset` column followed by one column per feature;
    /// undefined values are empty cells.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(std::iter::once("dataset").chain(self.names.iter().map(String::as_str)))?;
        for (d, row) in self.datasets.iter().zip(&self.rows) {
            let cells = row.iter().map(|v| v.map(|x| format!("{x:?}")).unwrap_or_default());
            w.write_record(std::iter::once(d.clone()).chain(cells))?;
        }
        w.flush().map_err(|e| Error::Csv(e.into()))?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.get(0) != Some("dataset") {
            return Err(Error::data("meta-feature csv must start with a `dataset` column"));
        }
        let names: Vec<String> = headers.iter().skip(1).map(str::to_owned).collect();
        let mut datasets = Vec::new();
        let mut rows = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.len() != names.len() + 1 {
                return Err(Error::RaggedRow {
                    row: i + 1,
                    expected: names.len() + 1,
                    found: rec.len(),
                });
            }
            datasets.push(rec[0].to_owned());
            rows.push(
                rec.iter()
                    .skip(1)
                    .map(|c| {
                        if c.is_empty() {
                            Ok(None)
                        } else {
                            c.parse::<f64>()
                                .map(Some)
                                .map_err(|_| Error::data(format!("row {}: bad value `{c}`", i + 1)))
                        }
                    })
                    .collect::<Result<_>>()?,
            );
        }
        Ok(Self { datasets, names, rows })
    }
}
