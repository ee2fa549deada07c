//! Breiman's artificial benchmark problems (twonorm, threenorm, ringnorm,
//! waveform). Classes are drawn with equal probability per sample.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{Dataset, FeatureKind};
use crate::error::Result;
use crate::rng;

const NORM_DIMS: usize = 20;
const WAVE_DIMS: usize = 21;

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

fn build(name: &str, n_features: usize, n_classes: usize, rows: Vec<(Vec<f64>, usize)>) -> Result<Dataset> {
    let features = rows.iter().flat_map(|(x, _)| x.iter().copied()).collect();
    let labels = rows.iter().map(|(_, y)| *y).collect();
    Dataset::new(
        name,
        features,
        n_features,
        vec![FeatureKind::Continuous; n_features],
        labels,
        (0..n_classes).map(|c| c.to_string()).collect(),
    )
}

/// Two 20-dimensional unit Gaussians centered at `±a`, `a_i = 2 / sqrt(20)`.
pub fn twonorm(n_samples: usize, seed: u64) -> Result<Dataset> {
    let mut rng = rng::stream(seed, &[0x2202]);
    let a = 2.0 / (NORM_DIMS as f64).sqrt();
    let rows = (0..n_samples)
        .map(|_| {
            let class = rng.random_range(0..2usize);
            let mean = if class == 0 { a } else { -a };
            ((0..NORM_DIMS).map(|_| mean + normal(&mut rng)).collect(), class)
        })
        .collect();
    build("twonorm", NORM_DIMS, 2, rows)
}

/// Class 0 is an equal mixture of unit Gaussians at `a` and `-a`; class 1 is
/// a unit Gaussian at `(a, -a, a, -a, ...)`, with `a_i = 2 / sqrt(20)`.
pub fn threenorm(n_samples: usize, seed: u64) -> Result<Dataset> {
    let mut rng = rng::stream(seed, &[0x3303]);
    let a = 2.0 / (NORM_DIMS as f64).sqrt();
    let rows = (0..n_samples)
        .map(|_| {
            let class = rng.random_range(0..2usize);
            let x = if class == 0 {
                let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                (0..NORM_DIMS).map(|_| sign * a + normal(&mut rng)).collect()
            } else {
                (0..NORM_DIMS)
                    .map(|j| if j % 2 == 0 { a } else { -a } + normal(&mut rng))
                    .collect()
            };
            (x, class)
        })
        .collect();
    build("threenorm", NORM_DIMS, 2, rows)
}

/// Class 0 ~ N(0, 4I); class 1 ~ N(a, I) with `a_i = 1 / sqrt(20)`.
pub fn ringnorm(n_samples: usize, seed: u64) -> Result<Dataset> {
    let mut rng = rng::stream(seed, &[0x4404]);
    let a = 1.0 / (NORM_DIMS as f64).sqrt();
    let rows = (0..n_samples)
        .map(|_| {
            let class = rng.random_range(0..2usize);
            let x = if class == 0 {
                (0..NORM_DIMS).map(|_| 2.0 * normal(&mut rng)).collect()
            } else {
                (0..NORM_DIMS).map(|_| a + normal(&mut rng)).collect()
            };
            (x, class)
        })
        .collect();
    build("ringnorm", NORM_DIMS, 2, rows)
}

/// Triangular base waves on 21 points: `h1(i) = max(6 - |i - 11|, 0)` for
/// `i = 1..=21`, `h2` is `h1` shifted right by 4 and `h3` shifted left by 4.
fn base_wave(shift: i64, i: i64) -> f64 {
    (6 - (i - 11 - shift).abs()).max(0) as f64
}

/// Three classes, each a random convex combination of two of the three
/// base waves plus unit Gaussian noise: class 0 mixes (h1, h2), class 1
/// mixes (h1, h3), class 2 mixes (h2, h3).
pub fn waveform(n_samples: usize, seed: u64) -> Result<Dataset> {
    const PAIRS: [(i64, i64); 3] = [(0, 4), (0, -4), (4, -4)];
    let mut rng = rng::stream(seed, &[0x5505]);
    let rows = (0..n_samples)
        .map(|_| {
            let class = rng.random_range(0..3usize);
            let (s1, s2) = PAIRS[class];
            let u: f64 = rng.random();
            let x = (1..=WAVE_DIMS as i64)
                .map(|i| u * base_wave(s1, i) + (1.0 - u) * base_wave(s2, i) + normal(&mut rng))
                .collect();
            (x, class)
        })
        .collect();
    build("waveform", WAVE_DIMS, 3, rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes_match_the_benchmark_definitions() {
        for (ds, d, c) in [
            (twonorm(300, 1).unwrap(), 20, 2),
            (threenorm(300, 1).unwrap(), 20, 2),
            (ringnorm(300, 1).unwrap(), 20, 2),
            (waveform(300, 1).unwrap(), 21, 3),
        ] {
            assert_eq!(ds.n_rows(), 300);
            assert_eq!(ds.n_features(), d);
            assert_eq!(ds.n_classes(), c);
            assert!(ds.class_counts().iter().all(|&n| n > 60));
        }
    }

    #[test]
    fn base_waves_peak_where_expected() {
        assert_eq!(base_wave(0, 11), 6.0);
        assert_eq!(base_wave(4, 15), 6.0);
        assert_eq!(base_wave(-4, 7), 6.0);
        assert_eq!(base_wave(0, 5), 0.0);
        assert_eq!(base_wave(0, 1), 0.0);
    }

    #[test]
    fn waveform_class_means_follow_base_waves() {
        // E[x_i | class 0] = (h1(i) + h2(i)) / 2
        let ds = waveform(6000, 5).unwrap();
        let rows: Vec<usize> = (0..ds.n_rows()).filter(|&i| ds.labels()[i] == 0).collect();
        for i in [7usize, 11, 13, 15] {
            let mean = rows.iter().map(|&r| ds.row(r)[i - 1]).sum::<f64>() / rows.len() as f64;
            let expected = (base_wave(0, i as i64) + base_wave(4, i as i64)) / 2.0;
            assert!((mean - expected).abs() < 0.2, "i={i}: {mean} vs {expected}");
        }
    }

    #[test]
    fn ringnorm_variances_differ_by_class() {
        let ds = ringnorm(4000, 2).unwrap();
        for class in 0..2 {
            let vals: Vec<f64> = (0..ds.n_rows())
                .filter(|&i| ds.labels()[i] == class)
                .map(|i| ds.row(i)[0])
                .collect();
            let m = vals.iter().sum::<f64>() / vals.len() as f64;
            let var = vals.iter().map(|v| (v - m).powi(2)).sum::<f64>() / vals.len() as f64;
            let expected = if class == 0 { 4.0 } else { 1.0 };
            assert!((var - expected).abs() < 0.3 * expected, "class {class} var {var}");
        }
    }
}
