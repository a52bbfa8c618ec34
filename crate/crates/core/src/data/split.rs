use rand::seq::SliceRandom;

use crate::data::seeded_rng;
use crate::error::{Error, Result};
use crate::represent::Dataset;
use crate::scalar::Scalar;

/// Per-class hold-out: `train_per_class` samples of every class train, the
/// rest test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitSpec {
    pub train_per_class: usize,
    pub seed: u64,
}

/// Shuffles each class's sample indices (classes visited in ascending id
/// order, one RNG stream for the whole split) and returns the first `take`
/// of each, sorted back into original order.
fn per_class_pick<T: Scalar>(
    data: &Dataset<T>,
    seed: u64,
    take: impl Fn(usize) -> usize,
) -> (Vec<usize>, Vec<usize>) {
    let mut rng = seeded_rng(seed);
    let (mut picked, mut rest) = (Vec::new(), Vec::new());
    for group in data.classes() {
        let mut idx = group.columns.clone();
        idx.shuffle(&mut rng);
        let k = take(idx.len());
        let (a, b) = idx.split_at_mut(k);
        a.sort_unstable();
        b.sort_unstable();
        picked.extend_from_slice(a);
        rest.extend_from_slice(b);
    }
    (picked, rest)
}

/// Seeded hold-out split. Both halves list classes in ascending id order,
/// and within a class keep the original sample order.
pub fn holdout_split<T: Scalar>(
    data: &Dataset<T>,
    spec: SplitSpec,
) -> Result<(Dataset<T>, Dataset<T>)> {
    if spec.train_per_class == 0 {
        return Err(Error::invalid("train_per_class must be at least 1"));
    }
    if let Some(small) = data
        .classes()
        .iter()
        .find(|c| c.columns.len() <= spec.train_per_class)
    {
        return Err(Error::invalid(format!(
            "class {} has {} samples; train_per_class {} leaves none for testing",
            small.id,
            small.columns.len(),
            spec.train_per_class
        )));
    }
    let (train, test) = per_class_pick(data, spec.seed, |_| spec.train_per_class);
    Ok((data.select(&train)?, data.select(&test)?))
}

/// Keeps a seeded random `per_class` samples of each class (all of a class
/// that has fewer).
pub fn subsample_per_class<T: Scalar>(
    data: &Dataset<T>,
    per_class: usize,
    seed: u64,
) -> Result<Dataset<T>> {
    if per_class == 0 {
        return Err(Error::invalid("per_class must be at least 1"));
    }
    let (keep, _) = per_class_pick(data, seed, |n| n.min(per_class));
    data.select(&keep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::represent::ClassId;

    fn dataset(sizes: &[(u32, usize)]) -> Dataset<f64> {
        let mut cols = Vec::new();
        let mut labels = Vec::new();
        for &(id, n) in sizes {
            for _ in 0..n {
                cols.push(vec![cols.len() as f64 + 1.0]);
                labels.push(ClassId(id));
            }
        }
        Dataset::from_columns(&cols, labels).unwrap()
    }

    #[test]
    fn fourteen_per_class() {
        let d = dataset(&[(0, 14), (1, 14)]);
        let (train, test) = holdout_split(
            &d,
            SplitSpec {
                train_per_class: 5,
                seed: 3,
            },
        )
        .unwrap();
        assert_eq!(train.class_group(ClassId(0)).unwrap().columns.len(), 5);
        assert_eq!(test.class_group(ClassId(0)).unwrap().columns.len(), 9);
        assert_eq!(train.class_ids(), vec![ClassId(0), ClassId(1)]);
        assert!(train.labels().windows(2).all(|w| w[0] <= w[1]));
        assert!(test.labels().windows(2).all(|w| w[0] <= w[1]));

        let err = holdout_split(
            &d,
            SplitSpec {
                train_per_class: 14,
                seed: 3,
            },
        );
        assert!(matches!(err, Err(Error::InvalidInput(m)) if m.contains("class 0")));
        assert!(holdout_split(
            &d,
            SplitSpec {
                train_per_class: 0,
                seed: 3
            }
        )
        .is_err());
    }

    #[test]
    fn seeded() {
        let d = dataset(&[(0, 10), (4, 12)]);
        let s = SplitSpec {
            train_per_class: 4,
            seed: 99,
        };
        assert_eq!(holdout_split(&d, s).unwrap(), holdout_split(&d, s).unwrap());
        let other = holdout_split(&d, SplitSpec { seed: 100, ..s }).unwrap();
        assert_ne!(holdout_split(&d, s).unwrap().0, other.0);
    }

    #[test]
    fn subsample_caps_each_class() {
        let d = dataset(&[(0, 10), (1, 3)]);
        let s = subsample_per_class(&d, 5, 1).unwrap();
        assert_eq!(s.class_group(ClassId(0)).unwrap().columns.len(), 5);
        assert_eq!(s.class_group(ClassId(1)).unwrap().columns.len(), 3);
        assert!(subsample_per_class(&d, 0, 1).is_err());
    }
}
