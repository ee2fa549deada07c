use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiment::WinnerReport;

/// Whether a dataset's best bootstrap rate is at most 1 or above 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegimeLabel {
    LE1,
    GT1,
}

impl RegimeLabel {
    pub fn from_rate(br: f64) -> Self {
        if br > 1.0 {
            RegimeLabel::GT1
        } else {
            RegimeLabel::LE1
        }
    }

    /// Class id used when the label is a classification target.
    pub fn class_id(self) -> usize {
        match self {
            RegimeLabel::LE1 => 0,
            RegimeLabel::GT1 => 1,
        }
    }
}

impl fmt::Display for RegimeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RegimeLabel::LE1 => "LE1",
            RegimeLabel::GT1 => "GT1",
        })
    }
}

/// Regime label of each report, in input order. With `p_threshold` set,
/// reports whose max p-value exceeds it (or is unknown) are dropped.
pub fn regime_labels(reports: &[WinnerReport], p_threshold: Option<f64>) -> Vec<(String, RegimeLabel)> {
    reports
        .iter()
        .filter(|r| match p_threshold {
            Some(t) => r.max_p_value.is_some_and(|p| p <= t),
            None => true,
        })
        .map(|r| (r.dataset.clone(), RegimeLabel::from_rate(r.best_br)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainValidationSplit {
    pub train: Vec<usize>,
    /// One dataset from each regime, lower index first.
    pub validation: [usize; 2],
}

/// Every pair `(i, j)`, `i < j`, of datasets with different labels is held
/// out once; the rest train. Yields `|LE1| * |GT1|` splits in
/// lexicographic pair order.
pub fn leave_two_out_splits(labels: &[RegimeLabel]) -> Result<Vec<TrainValidationSplit>> {
    let n_gt = labels.iter().filter(|&&l| l == RegimeLabel::GT1).count();
    if n_gt == 0 || n_gt == labels.len() {
        return Err(Error::invalid("leave-two-out splits need both regimes present"));
    }
    let mut out = Vec::with_capacity(n_gt * (labels.len() - n_gt));
    for i in 0..labels.len() {
        for j in i + 1..labels.len() {
            if labels[i] != labels[j] {
                out.push(TrainValidationSplit {
                    train: (0..labels.len()).filter(|&t| t != i && t != j).collect(),
                    validation: [i, j],
                });
            }
        }
    }
    Ok(out)
}
