use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{neighborhood_scale, Dataset};
use crate::error::{Error, Result};

pub const MAX_K: usize = 10;
/// Number of (k, l) pairs with `1 <= k <= 10`, `0 <= l <= k`.
pub const N_KL: usize = 65;

/// Position of `(k, l)` in the flattened 65-value layout.
pub fn kl_index(k: usize, l: usize) -> usize {
    debug_assert!((1..=MAX_K).contains(&k) && l <= k);
    (k - 1) * (k + 2) / 2 + l
}

/// Names `1_0, 1_1, 2_0, ..., 10_10` in layout order.
pub fn kl_names() -> Vec<String> {
    (1..=MAX_K)
        .flat_map(|k| (0..=k).map(move |l| format!("{k}_{l}")))
        .collect()
}

/// Distribution of same-class counts among the k nearest neighbors.
///
/// `value(k, l)` is the percentage of observations that have exactly `l`
/// same-class points among their `k` nearest neighbors, so each k-row sums
/// to 100.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KLStats {
    pub dataset: String,
    pub n_classes: usize,
    pub values: Vec<f64>,
}

impl KLStats {
    pub fn value(&self, k: usize, l: usize) -> f64 {
        self.values[kl_index(k, l)]
    }

    /// Every value multiplied by the number of classes, named `k_l*C`.
    pub fn class_scaled(&self) -> Vec<f64> {
        class_scaled_features(&self.values, self.n_classes)
    }
}

pub fn class_scaled_features(values: &[f64], n_classes: usize) -> Vec<f64> {
    values.iter().map(|v| v * n_classes as f64).collect()
}

#[inline]
fn manhattan(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// Indices of the `MAX_K` rows nearest to `i` (excluding `i`), nearest
/// first; equal distances go to the lower row index.
fn nearest(ds: &Dataset, i: usize) -> [usize; MAX_K] {
    let xi = ds.row(i);
    let mut best: Vec<(f64, usize)> = Vec::with_capacity(MAX_K + 1);
    for j in 0..ds.n_rows() {
        if j == i {
            continue;
        }
        let d = manhattan(xi, ds.row(j));
        if best.len() == MAX_K && d >= best[MAX_K - 1].0 {
            // j is larger than every kept index, so ties lose
            continue;
        }
        let pos = best.partition_point(|&(bd, bj)| bd < d || (bd == d && bj < j));
        best.insert(pos, (d, j));
        best.truncate(MAX_K);
    }
    let mut out = [0; MAX_K];
    for (o, (_, j)) in out.iter_mut().zip(best) {
        *o = j;
    }
    out
}

/// k_l statistics of an already scaled dataset (see [`neighborhood_scale`]).
pub fn kl_statistics(ds: &Dataset) -> Result<KLStats> {
    let n = ds.n_rows();
    if n <= MAX_K {
        return Err(Error::invalid(format!(
            "k_l statistics need more than {MAX_K} rows, `{}` has {n}",
            ds.name()
        )));
    }
    let labels = ds.labels();
    let per_row: Vec<[usize; MAX_K]> = (0..n)
        .into_par_iter()
        .map(|i| {
            let nb = nearest(ds, i);
            // same-class count within the first k neighbors, for k = 1..=10
            let mut same = [0; MAX_K];
            let mut running = 0;
            for (k, &j) in nb.iter().enumerate() {
                running += usize::from(labels[j] == labels[i]);
                same[k] = running;
            }
            same
        })
        .collect();
    let mut counts = vec![0usize; N_KL];
    for same in &per_row {
        for k in 1..=MAX_K {
            counts[kl_index(k, same[k - 1])] += 1;
        }
    }
    let values = counts.iter().map(|&c| 100.0 * c as f64 / n as f64).collect();
    Ok(KLStats {
        dataset: ds.name().to_owned(),
        n_classes: ds.n_classes(),
        values,
    })
}

/// Scales `ds` with [`neighborhood_scale`] and computes its k_l statistics.
pub fn dataset_kl(ds: &Dataset) -> Result<KLStats> {
    kl_statistics(&neighborhood_scale(ds)?)
}

/// CSV with columns `dataset`, `n_classes` and the 65 `k_l` values.
pub fn write_kl_csv<W: Write>(stats: &[KLStats], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let names = kl_names();
    w.write_record(["dataset", "n_classes"].into_iter().chain(names.iter().map(String::as_str)))?;
    for s in stats {
        w.write_record(
            [s.dataset.clone(), s.n_classes.to_string()]
                .into_iter()
                .chain(s.values.iter().map(|v| format!("{v:?}"))),
        )?;
    }
    w.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}

pub fn read_kl_csv<R: Read>(reader: R) -> Result<Vec<KLStats>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let expected: Vec<String> = ["dataset".to_owned(), "n_classes".to_owned()]
        .into_iter()
        .chain(kl_names())
        .collect();
    if rdr.headers()?.iter().ne(expected.iter().map(String::as_str)) {
        return Err(Error::data("k_l csv header must be dataset,n_classes,1_0,...,10_10"));
    }
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let bad = |c: &str| Error::data(format!("k_l csv row {}: bad value `{c}`", i + 1));
        let n_classes = rec[1].parse::<usize>().map_err(|_| bad(&rec[1]))?;
        let values = rec
            .iter()
            .skip(2)
            .map(|c| c.parse::<f64>().map_err(|_| bad(c)))
            .collect::<Result<Vec<_>>>()?;
        out.push(KLStats {
            dataset: rec[0].to_owned(),
            n_classes,
            values,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_covers_65_pairs() {
        let names = kl_names();
        assert_eq!(names.len(), N_KL);
        assert_eq!(names[kl_index(1, 0)], "1_0");
        assert_eq!(names[kl_index(2, 2)], "2_2");
        assert_eq!(names[kl_index(9, 2)], "9_2");
        assert_eq!(names[kl_index(10, 10)], "10_10");
    }

    #[test]
    fn csv_round_trip() {
        let s = KLStats {
            dataset: "a, b".into(),
            n_classes: 3,
            values: (0..N_KL).map(|i| i as f64 / 7.0).collect(),
        };
        let mut buf = Vec::new();
        write_kl_csv(std::slice::from_ref(&s), &mut buf).unwrap();
        assert_eq!(read_kl_csv(buf.as_slice()).unwrap(), vec![s]);
        assert!(read_kl_csv("dataset,x\n".as_bytes()).is_err());
    }

    #[test]
    fn class_scaling_multiplies_by_class_count() {
        assert_eq!(class_scaled_features(&[50.0, 0.0], 2), vec![100.0, 0.0]);
    }

    #[test]
    fn too_few_rows_is_an_error() {
        let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![f64::from(i)]).collect();
        let ds = Dataset::from_rows("t", &rows, (0..10).map(|i| i % 2).collect()).unwrap();
        assert!(kl_statistics(&ds).is_err());
    }

    #[test]
    fn equidistant_neighbors_prefer_lower_index() {
        // row 2 at 0; rows 0..=1 and 3..=12 all at distance 1
        let rows: Vec<Vec<f64>> = (0..13).map(|i| vec![if i == 2 { 0.0 } else { 1.0 }]).collect();
        let ds = Dataset::from_rows("t", &rows, (0..13).map(|i| i % 2).collect());
        // duplicate rows are fine for the statistic, only the constructor is used
        let ds = ds.unwrap();
        assert_eq!(nearest(&ds, 2), [0, 1, 3, 4, 5, 6, 7, 8, 9, 10]);
    }
}
