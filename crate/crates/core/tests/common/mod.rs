//! Brute-force reference implementations shared by integration tests.
#![allow(dead_code)]

use brforest::{Dataset, SplitQuality};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Splits whose impurities differ by less than this count as tied.
pub const TIE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleSplit {
    pub feature: usize,
    pub threshold: f64,
    pub impurity: f64,
}

fn node_impurity(counts: &[u64], quality: SplitQuality) -> f64 {
    let n: u64 = counts.iter().sum();
    match quality {
        SplitQuality::Gini => {
            let sq: u64 = counts.iter().map(|c| c * c).sum();
            (n * n - sq) as f64 / (n * n) as f64
        }
        SplitQuality::Entropy => counts
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| {
                let p = c as f64 / n as f64;
                -p * p.ln() / std::f64::consts::LN_2
            })
            .sum(),
    }
}

/// Every threshold between consecutive distinct values of every candidate
/// feature, scored by weighted child impurity. Rows may repeat; each copy
/// counts once.
pub fn exhaustive_best_split(
    x: &[Vec<f64>],
    y: &[usize],
    n_classes: usize,
    rows: &[usize],
    features: &[usize],
    quality: SplitQuality,
    min_leaf: u64,
) -> Option<OracleSplit> {
    let mut candidates = Vec::new();
    for &f in features {
        let mut values: Vec<f64> = rows.iter().map(|&r| x[r][f]).collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        for w in values.windows(2) {
            let mid = (w[0] + w[1]) / 2.0;
            let t = if mid < w[1] { mid } else { w[0] };
            let mut left = vec![0u64; n_classes];
            let mut right = vec![0u64; n_classes];
            for &r in rows {
                if x[r][f] <= t {
                    left[y[r]] += 1;
                } else {
                    right[y[r]] += 1;
                }
            }
            let (nl, nr): (u64, u64) = (left.iter().sum(), right.iter().sum());
            if nl < min_leaf || nr < min_leaf {
                continue;
            }
            let total = (nl + nr) as f64;
            let imp = nl as f64 / total * node_impurity(&left, quality) + nr as f64 / total * node_impurity(&right, quality);
            candidates.push(OracleSplit {
                feature: f,
                threshold: t,
                impurity: imp,
            });
        }
    }
    let best = candidates.iter().map(|c| c.impurity).fold(f64::INFINITY, f64::min);
    candidates
        .into_iter()
        .filter(|c| c.impurity <= best + TIE_EPS)
        .min_by(|a, b| (a.feature, a.threshold).partial_cmp(&(b.feature, b.threshold)).unwrap())
}

/// k_l values (percentages, layout `1_0, 1_1, 2_0, ...`) from a full
/// distance matrix. Equal distances rank the lower row index first.
pub fn brute_force_kl(x: &[Vec<f64>], y: &[usize]) -> Vec<f64> {
    let n = x.len();
    let mut counts = vec![0usize; 65];
    for i in 0..n {
        let mut others: Vec<(f64, usize)> = (0..n)
            .filter(|&j| j != i)
            .map(|j| (x[i].iter().zip(&x[j]).map(|(a, b)| (a - b).abs()).sum::<f64>(), j))
            .collect();
        others.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut offset = 0;
        for k in 1..=10 {
            let same = others[..k].iter().filter(|&&(_, j)| y[j] == y[i]).count();
            counts[offset + same] += 1;
            offset += k + 1;
        }
    }
    counts.iter().map(|&c| 100.0 * c as f64 / n as f64).collect()
}

/// Random labelled rows; `levels` > 0 draws integer values in
/// `0..levels` so ties are common, otherwise continuous values.
pub struct Fixture {
    pub x: Vec<Vec<f64>>,
    pub y: Vec<usize>,
    pub n_classes: usize,
}

impl Fixture {
    pub fn random(seed: u64, n_rows: usize, n_features: usize, n_classes: usize, levels: u32) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = (0..n_rows)
            .map(|_| {
                (0..n_features)
                    .map(|_| {
                        if levels > 0 {
                            f64::from(rng.random_range(0..levels))
                        } else {
                            rng.random_range(-3.0..3.0)
                        }
                    })
                    .collect()
            })
            .collect();
        // every class present so the dataset is valid
        let y = (0..n_rows)
            .map(|i| if i < n_classes { i } else { rng.random_range(0..n_classes) })
            .collect();
        Fixture { x, y, n_classes }
    }

    pub fn dataset(&self) -> Dataset {
        Dataset::from_rows("fixture", &self.x, self.y.clone()).unwrap()
    }
}

/// Outcome of running `cases` randomized best-split comparisons.
pub fn best_split_mismatches(cases: u64) -> Vec<String> {
    use brforest::tree::best_split;
    let mut failures = Vec::new();
    for case in 0..cases {
        let mut rng = ChaCha8Rng::seed_from_u64(0xB5_0000 + case);
        let n = rng.random_range(2..=14);
        let d = rng.random_range(1..=4);
        let c = rng.random_range(2..=3);
        let levels = if case % 3 == 0 { 0 } else { rng.random_range(2..=5) };
        let fx = Fixture::random(case, n, d, c, levels);
        let ds = fx.dataset();
        // multiset with repeats, like a bootstrap sample
        let m = rng.random_range(2..=2 * n);
        let rows: Vec<usize> = (0..m).map(|_| rng.random_range(0..n)).collect();
        let k = rng.random_range(1..=d);
        let mut features: Vec<usize> = (0..d).collect();
        for i in 0..k {
            let j = rng.random_range(i..d);
            features.swap(i, j);
        }
        features.truncate(k);
        let quality = if case % 2 == 0 { SplitQuality::Gini } else { SplitQuality::Entropy };
        let min_leaf = rng.random_range(1..=3u32);

        let got = best_split(ds.view(), &rows, &features, quality, min_leaf).unwrap();
        let want = exhaustive_best_split(&fx.x, &fx.y, c, &rows, &features, quality, u64::from(min_leaf));
        let same = match (got, want) {
            (None, None) => true,
            (Some(g), Some(w)) => {
                g.feature == w.feature
                    && g.threshold == w.threshold
                    && (g.weighted_child_impurity - w.impurity).abs() <= 1e-9
            }
            _ => false,
        };
        if !same {
            failures.push(format!("case {case}: got {got:?}, expected {want:?}"));
        }
    }
    failures
}

/// Outcome of running `cases` randomized k_l comparisons.
pub fn kl_mismatches(cases: u64) -> Vec<String> {
    let mut failures = Vec::new();
    for case in 0..cases {
        let mut rng = ChaCha8Rng::seed_from_u64(0x4B_0000 + case);
        let n = rng.random_range(11..=60);
        let d = rng.random_range(1..=5);
        let c = rng.random_range(2..=4);
        let levels = if case % 2 == 0 { 0 } else { rng.random_range(2..=4) };
        let fx = Fixture::random(0x4B_1000 + case, n, d, c, levels);
        let got = brforest::meta::kl_statistics(&fx.dataset()).unwrap();
        let want = brute_force_kl(&fx.x, &fx.y);
        if got.values != want {
            failures.push(format!("case {case} (n={n}, d={d}, c={c})"));
        }
    }
    failures
}
