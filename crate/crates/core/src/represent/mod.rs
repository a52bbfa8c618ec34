//! Datasets, class-wise residuals and scores, and the single-stage
//! SRC / CRC / KNN classifiers.

mod dataset;
mod residual;

pub use dataset::{ClassGroup, ClassId, Dataset};
pub use residual::{class_residuals, confidence_scores, ResidualVector, ScoreVector};

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::linsolve::{
    check_query, ridge_projector, solve_lasso, CoefficientVector, RidgeProjector, SolverConfig,
};
use crate::scalar::Scalar;

/// Outcome of a residual-based classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledVerdict<T> {
    /// Minimum-residual (equivalently maximum-score) class.
    pub label: ClassId,
    /// Plain (unsquared) class residuals.
    pub residuals: ResidualVector<T>,
    pub scores: ScoreVector<T>,
    pub coefficients: CoefficientVector<T>,
}

impl<T: Scalar> LabeledVerdict<T> {
    pub(crate) fn from_coefficients(
        data: &Dataset<T>,
        query: &[T],
        coefficients: CoefficientVector<T>,
    ) -> Result<Self> {
        let residuals = class_residuals(&coefficients, data, query, false)?;
        let scores = confidence_scores(&residuals)?;
        let label = residuals
            .argmin()
            .ok_or_else(|| Error::invalid("dataset has no classes"))?;
        Ok(Self {
            label,
            residuals,
            scores,
            coefficients,
        })
    }

    /// The score of the winning class, which is the maximum score.
    pub fn top_score(&self) -> T {
        self.scores
            .get(self.label)
            .expect("label is one of the scored classes")
    }
}

/// Sparse representation classifier: lasso coding over every sample.
pub fn classify_src<T: Scalar>(
    data: &Dataset<T>,
    query: &[T],
    cfg: &SolverConfig<T>,
) -> Result<LabeledVerdict<T>> {
    let coefficients = solve_lasso(data.features(), query, cfg)?;
    LabeledVerdict::from_coefficients(data, query, coefficients)
}

/// Collaborative representation classifier: ridge coding over every sample.
pub fn classify_crc<T: Scalar>(
    data: &Dataset<T>,
    query: &[T],
    l2_penalty: T,
) -> Result<LabeledVerdict<T>> {
    check_query(data.features(), query)?;
    let projector = ridge_projector(data.features(), l2_penalty)?;
    classify_crc_with(data, &projector, query)
}

/// CRC with a projector already built for `data`'s feature matrix.
pub fn classify_crc_with<T: Scalar>(
    data: &Dataset<T>,
    projector: &RidgeProjector<T>,
    query: &[T],
) -> Result<LabeledVerdict<T>> {
    if projector.operator().rows() != data.len() {
        return Err(Error::invalid(format!(
            "projector built for {} samples, dataset has {}",
            projector.operator().rows(),
            data.len()
        )));
    }
    check_query(data.features(), query)?;
    let coefficients = projector.apply(query)?;
    LabeledVerdict::from_coefficients(data, query, coefficients)
}

/// Majority vote among the `k` nearest samples in Euclidean distance.
/// Distance ties go to the lower sample index, vote ties to the lower class
/// id.
pub fn classify_knn<T: Scalar>(data: &Dataset<T>, query: &[T], k: usize) -> Result<ClassId> {
    if k == 0 || k > data.len() {
        return Err(Error::invalid(format!(
            "k must be in 1..={}, got {k}",
            data.len()
        )));
    }
    check_query(data.features(), query)?;
    let mut dist: Vec<(T, usize)> = data
        .features()
        .columns()
        .enumerate()
        .map(|(j, col)| {
            let d = col
                .iter()
                .zip(query)
                .map(|(&a, &b)| (a - b) * (a - b))
                .sum::<T>();
            (d, j)
        })
        .collect();
    let by_distance = |a: &(T, usize), b: &(T, usize)| {
        a.0.partial_cmp(&b.0)
            .unwrap_or(Ordering::Equal)
            .then(a.1.cmp(&b.1))
    };
    if k < dist.len() {
        dist.select_nth_unstable_by(k - 1, by_distance);
        dist.truncate(k);
    }
    let mut votes: Vec<(ClassId, usize)> = Vec::new();
    for &(_, j) in &dist {
        let label = data.labels()[j];
        match votes.iter_mut().find(|(c, _)| *c == label) {
            Some((_, n)) => *n += 1,
            None => votes.push((label, 1)),
        }
    }
    votes.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    Ok(votes[0].0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linsolve::solve_ridge;

    fn two_axes() -> Dataset<f64> {
        Dataset::from_columns(&[[1.0, 0.0], [0.0, 1.0]], vec![ClassId(1), ClassId(2)]).unwrap()
    }

    #[test]
    fn crc_near_orthogonal_case() {
        let v = classify_crc(&two_axes(), &[1.0, 0.1], 1e-6).unwrap();
        assert_eq!(v.label, ClassId(1));
        let c = v.coefficients.as_slice();
        assert!((c[0] - 1.0).abs() < 1e-5 && (c[1] - 0.1).abs() < 1e-5);
        assert_eq!(v.top_score(), v.scores.max().unwrap());
    }

    #[test]
    fn crc_with_projector_matches_direct_ridge() {
        let data = two_axes();
        let p = ridge_projector(data.features(), 0.3).unwrap();
        let v = classify_crc_with(&data, &p, &[0.4, -0.2]).unwrap();
        let direct = solve_ridge(data.features(), &[0.4, -0.2], 0.3).unwrap();
        for (a, b) in v.coefficients.as_slice().iter().zip(direct.as_slice()) {
            assert!((a - b).abs() < 1e-12);
        }
        let other = ridge_projector(&crate::DenseMatrix::identity(3).unwrap(), 0.3).unwrap();
        assert!(classify_crc_with(&data, &other, &[0.4, -0.2]).is_err());
    }

    #[test]
    fn src_on_exact_training_column() {
        let data = Dataset::from_columns(
            &[[1.0, 0.0, 0.0], [0.0, 0.6, 0.8], [0.0, 0.8, -0.6]],
            vec![ClassId(0), ClassId(1), ClassId(2)],
        )
        .unwrap();
        // On unit columns the lasso leaves a residual of about alpha, so the
        // exact-match check needs a small penalty.
        let cfg = SolverConfig {
            l1_penalty: 1e-4,
            ..SolverConfig::default()
        };
        let v = classify_src(&data, &[0.0, 0.6, 0.8], &cfg).unwrap();
        assert_eq!(v.label, ClassId(1));
        assert!(v.residuals.get(ClassId(1)).unwrap() <= 1e-3);
    }

    fn knn_data() -> Dataset<f64> {
        // Distances from the origin: 1, 2, 3, 4.
        Dataset::from_columns(
            &[[1.0, 0.0], [0.0, 2.0], [3.0, 0.0], [0.0, 4.0]],
            vec![ClassId(5), ClassId(2), ClassId(2), ClassId(5)],
        )
        .unwrap()
    }

    #[test]
    fn knn_majority_and_ties() {
        let d = knn_data();
        assert_eq!(classify_knn(&d, &[0.0, 2.0], 1).unwrap(), ClassId(2));
        // neighbors (5, 2) -> tie -> lower id
        assert_eq!(classify_knn(&d, &[0.0, 0.0], 2).unwrap(), ClassId(2));
        // neighbors (5, 2, 2) -> 2
        assert_eq!(classify_knn(&d, &[0.0, 0.0], 3).unwrap(), ClassId(2));
        assert!(classify_knn(&d, &[0.0, 0.0], 5).is_err());
        assert!(classify_knn(&d, &[0.0, 0.0], 0).is_err());
    }

    #[test]
    fn knn_three_neighbors_majority() {
        let d = Dataset::from_columns(
            &[[1.0], [2.0], [3.0], [10.0]],
            vec![ClassId(2), ClassId(2), ClassId(5), ClassId(5)],
        )
        .unwrap();
        assert_eq!(classify_knn(&d, &[0.0], 3).unwrap(), ClassId(2));
    }
}
