use rand::seq::SliceRandom;

use super::Dataset;
use crate::rng;

const FOLD_STREAM: u64 = 0xF01D;

/// Two-fold partition of a dataset's rows for one CV repeat.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldAssignment {
    pub repeat_index: u64,
    folds: Vec<u8>,
}

impl FoldAssignment {
    pub fn fold_of(&self, row: usize) -> u8 {
        self.folds[row]
    }

    pub fn folds(&self) -> &[u8] {
        &self.folds
    }

    /// Row indices of `fold`, ascending.
    pub fn indices(&self, fold: u8) -> Vec<usize> {
        self.folds
            .iter()
            .enumerate()
            .filter(|(_, &f)| f == fold)
            .map(|(i, _)| i)
            .collect()
    }
}

pub fn stratified_two_fold(ds: &Dataset, repeat_index: u64, seed: u64) -> FoldAssignment {
    stratified_two_fold_labels(ds.labels(), ds.n_classes(), repeat_index, seed)
}

/// Shuffles each class's members with a stream derived from
/// `(seed, repeat_index)` and deals them alternately into the two folds.
///
/// Classes with an odd member count put their extra row into alternating
/// folds, so overall fold sizes stay within one of each other too.
pub fn stratified_two_fold_labels(
    labels: &[usize],
    n_classes: usize,
    repeat_index: u64,
    seed: u64,
) -> FoldAssignment {
    let mut rng = rng::stream(seed, &[FOLD_STREAM, repeat_index]);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); n_classes];
    for (i, &y) in labels.iter().enumerate() {
        members[y].push(i);
    }
    let mut folds = vec![0u8; labels.len()];
    let mut start = 0u8;
    for class in &mut members {
        class.shuffle(&mut rng);
        for (pos, &i) in class.iter().enumerate() {
            folds[i] = start ^ (pos % 2) as u8;
        }
        if class.len() % 2 == 1 {
            start ^= 1;
        }
    }
    FoldAssignment {
        repeat_index,
        folds,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn per_class_sizes(labels: &[usize], fa: &FoldAssignment, c: usize) -> (usize, usize) {
        let mut sizes = (0, 0);
        for (i, &y) in labels.iter().enumerate() {
            if y == c {
                if fa.fold_of(i) == 0 {
                    sizes.0 += 1;
                } else {
                    sizes.1 += 1;
                }
            }
        }
        sizes
    }

    #[test]
    fn even_classes_split_evenly() {
        let labels: Vec<usize> = [vec![0; 4], vec![1; 6]].concat();
        let fa = stratified_two_fold_labels(&labels, 2, 0, 1);
        assert_eq!(per_class_sizes(&labels, &fa, 0), (2, 2));
        assert_eq!(per_class_sizes(&labels, &fa, 1), (3, 3));
    }

    #[test]
    fn odd_classes_split_within_one() {
        let labels: Vec<usize> = [vec![0; 5], vec![1; 3]].concat();
        let fa = stratified_two_fold_labels(&labels, 2, 3, 9);
        let (x, y) = per_class_sizes(&labels, &fa, 0);
        assert_eq!([x.max(y), x.min(y)], [3, 2]);
        let (x, y) = per_class_sizes(&labels, &fa, 1);
        assert_eq!([x.max(y), x.min(y)], [2, 1]);
        // extras go to different folds, so totals are 4 and 4
        assert_eq!(fa.indices(0).len(), 4);
    }

    #[test]
    fn deterministic_per_seed_and_repeat() {
        let labels: Vec<usize> = (0..40).map(|i| i % 3).collect();
        let a = stratified_two_fold_labels(&labels, 3, 5, 11);
        let b = stratified_two_fold_labels(&labels, 3, 5, 11);
        let c = stratified_two_fold_labels(&labels, 3, 6, 11);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    proptest! {
        #[test]
        fn folds_partition_and_stratify(
            counts in proptest::collection::vec(2usize..15, 2..5),
            repeat in 0u64..50,
            seed in any::<u64>(),
        ) {
            let labels: Vec<usize> = counts.iter().enumerate().flat_map(|(c, &n)| std::iter::repeat_n(c, n)).collect();
            let fa = stratified_two_fold_labels(&labels, counts.len(), repeat, seed);
            let f0 = fa.indices(0);
            let f1 = fa.indices(1);
            prop_assert_eq!(f0.len() + f1.len(), labels.len());
            prop_assert!(!f0.is_empty() && !f1.is_empty());
            prop_assert!((f0.len() as i64 - f1.len() as i64).abs() <= 1);
            for c in 0..counts.len() {
                let (a, b) = per_class_sizes(&labels, &fa, c);
                prop_assert!((a as i64 - b as i64).abs() <= 1);
            }
        }
    }
}
