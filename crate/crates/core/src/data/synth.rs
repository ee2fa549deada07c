use rand::seq::index;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{Dataset, FeatureKind};
use crate::error::{Error, Result};
use crate::rng;

/// Parameters of the hypercube-cluster generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub n_samples: usize,
    pub n_features: usize,
    pub n_classes: usize,
    pub n_clusters_per_class: usize,
    pub class_sep: f64,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            n_samples: 300,
            n_features: 2,
            n_classes: 2,
            n_clusters_per_class: 1,
            class_sep: 1.0,
            seed: 1,
        }
    }
}

/// Gaussian clusters at the vertices of a hypercube.
///
/// Cluster centers are distinct vertices of the hypercube with side
/// `2 * class_sep` centered at the origin, chosen at random and assigned to
/// classes round-robin. Each sample is its cluster center plus unit normal
/// noise in every coordinate. Samples are split as evenly as possible across
/// clusters and the rows are shuffled.
pub fn synth_classification(spec: &SynthSpec) -> Result<Dataset> {
    let n_clusters = spec.n_classes * spec.n_clusters_per_class;
    if spec.n_features == 0 || spec.n_classes < 2 || spec.n_clusters_per_class == 0 {
        return Err(Error::invalid("need n_features >= 1, n_classes >= 2, n_clusters_per_class >= 1"));
    }
    if spec.n_samples < n_clusters {
        return Err(Error::invalid(format!(
            "n_samples {} is smaller than the {n_clusters} clusters",
            spec.n_samples
        )));
    }
    if !(spec.class_sep >= 0.0 && spec.class_sep.is_finite()) {
        return Err(Error::invalid("class_sep must be finite and non-negative"));
    }
    if spec.n_features < CODED_DIMS && n_clusters > 1usize << spec.n_features {
        return Err(Error::invalid(format!(
            "{n_clusters} clusters requested but a {}-dimensional hypercube has only {} vertices",
            spec.n_features,
            1usize << spec.n_features
        )));
    }

    let mut rng = rng::stream(spec.seed, &[0x5157]);
    let centers = draw_centers(spec, &mut rng);

    let mut rows: Vec<(Vec<f64>, usize)> = Vec::with_capacity(spec.n_samples);
    for (cluster, center) in centers.iter().enumerate() {
        let size = spec.n_samples / n_clusters + usize::from(cluster < spec.n_samples % n_clusters);
        let class = cluster % spec.n_classes;
        for _ in 0..size {
            let x = center
                .iter()
                .map(|c| c + rng.sample::<f64, _>(StandardNormal))
                .collect();
            rows.push((x, class));
        }
    }
    rows.shuffle(&mut rng);

    let features = rows.iter().flat_map(|(x, _)| x.iter().copied()).collect();
    let labels = rows.iter().map(|(_, y)| *y).collect();
    let class_names = (0..spec.n_classes).map(|c| c.to_string()).collect();
    Dataset::new(
        format!("synth_sep{}", spec.class_sep),
        features,
        spec.n_features,
        vec![FeatureKind::Continuous; spec.n_features],
        labels,
        class_names,
    )
}

/// The cluster centers used by [`synth_classification`], in cluster order.
pub fn cluster_centers(spec: &SynthSpec) -> Vec<Vec<f64>> {
    let mut rng = rng::stream(spec.seed, &[0x5157]);
    draw_centers(spec, &mut rng)
}

// Vertices are sampled without replacement over the first CODED_DIMS
// coordinates; any further coordinates get a random sign per cluster.
const CODED_DIMS: usize = 30;

fn draw_centers<R: Rng>(spec: &SynthSpec, rng: &mut R) -> Vec<Vec<f64>> {
    let n_clusters = spec.n_classes * spec.n_clusters_per_class;
    let coded = spec.n_features.min(CODED_DIMS);
    let codes = index::sample(rng, 1usize << coded, n_clusters).into_vec();
    codes
        .into_iter()
        .map(|code| {
            (0..spec.n_features)
                .map(|j| {
                    let positive = if j < coded { (code >> j) & 1 == 1 } else { rng.random() };
                    if positive {
                        spec.class_sep
                    } else {
                        -spec.class_sep
                    }
                })
                .collect()
        })
        .collect()
}
