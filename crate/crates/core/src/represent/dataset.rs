use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::linsolve::DenseMatrix;
use crate::scalar::Scalar;

/// Integer class label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClassId(pub u32);

impl fmt::Display for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<u32> for ClassId {
    fn from(v: u32) -> Self {
        ClassId(v)
    }
}

/// Column indices belonging to one class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassGroup {
    pub id: ClassId,
    pub columns: Vec<usize>,
}

/// Labeled samples stored as the columns of a `d × m` matrix, with the
/// class partition precomputed in ascending class-id order.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    features: DenseMatrix<T>,
    labels: Vec<ClassId>,
    classes: Vec<ClassGroup>,
}

impl<T: Scalar> Dataset<T> {
    pub fn new(features: DenseMatrix<T>, labels: Vec<ClassId>) -> Result<Self> {
        if labels.len() != features.cols() {
            return Err(Error::invalid(format!(
                "{} labels for {} samples",
                labels.len(),
                features.cols()
            )));
        }
        let mut groups: BTreeMap<ClassId, Vec<usize>> = BTreeMap::new();
        for (j, &label) in labels.iter().enumerate() {
            groups.entry(label).or_default().push(j);
        }
        let classes = groups
            .into_iter()
            .map(|(id, columns)| ClassGroup { id, columns })
            .collect();
        Ok(Self {
            features,
            labels,
            classes,
        })
    }

    pub fn from_columns<C: AsRef<[T]>>(columns: &[C], labels: Vec<ClassId>) -> Result<Self> {
        Self::new(DenseMatrix::from_columns(columns)?, labels)
    }

    pub fn features(&self) -> &DenseMatrix<T> {
        &self.features
    }

    pub fn labels(&self) -> &[ClassId] {
        &self.labels
    }

    pub fn classes(&self) -> &[ClassGroup] {
        &self.classes
    }

    pub fn class_ids(&self) -> Vec<ClassId> {
        self.classes.iter().map(|c| c.id).collect()
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    /// Feature dimension `d`.
    pub fn dim(&self) -> usize {
        self.features.rows()
    }

    /// Sample count `m`.
    pub fn len(&self) -> usize {
        self.features.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn sample(&self, j: usize) -> &[T] {
        self.features.column(j)
    }

    pub fn class_group(&self, id: ClassId) -> Option<&ClassGroup> {
        self.classes
            .binary_search_by_key(&id, |c| c.id)
            .ok()
            .map(|i| &self.classes[i])
    }

    /// Subset of samples in the given order.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let features = self.features.select_columns(indices)?;
        let labels = indices.iter().map(|&j| self.labels[j]).collect();
        Self::new(features, labels)
    }

    /// Samples of the listed classes only, keeping their original order.
    pub fn restrict_to_classes(&self, ids: &[ClassId]) -> Result<Self> {
        if ids.is_empty() {
            return Err(Error::invalid("class list is empty"));
        }
        for id in ids {
            if self.class_group(*id).is_none() {
                return Err(Error::invalid(format!("class {id} not present in dataset")));
            }
        }
        let indices: Vec<usize> = (0..self.len())
            .filter(|&j| ids.contains(&self.labels[j]))
            .collect();
        self.select(&indices)
    }

    /// Replaces the feature matrix, keeping labels. Used by preprocessing
    /// steps that change `d` but not `m`.
    pub fn with_features(&self, features: DenseMatrix<T>) -> Result<Self> {
        if features.cols() != self.len() {
            return Err(Error::invalid(format!(
                "replacement has {} samples, dataset has {}",
                features.cols(),
                self.len()
            )));
        }
        Ok(Self {
            features,
            labels: self.labels.clone(),
            classes: self.classes.clone(),
        })
    }

    /// Smallest number of samples in any class.
    pub fn min_class_size(&self) -> usize {
        self.classes
            .iter()
            .map(|c| c.columns.len())
            .min()
            .unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> Dataset<f64> {
        Dataset::from_columns(
            &[[1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [2.0, 0.0]],
            vec![ClassId(5), ClassId(2), ClassId(5), ClassId(9)],
        )
        .unwrap()
    }

    #[test]
    fn classes_are_sorted_and_exhaustive() {
        let d = toy();
        assert_eq!(d.class_ids(), vec![ClassId(2), ClassId(5), ClassId(9)]);
        assert_eq!(d.class_group(ClassId(5)).unwrap().columns, vec![0, 2]);
        let total: usize = d.classes().iter().map(|c| c.columns.len()).sum();
        assert_eq!(total, d.len());
        assert_eq!(d.min_class_size(), 1);
    }

    #[test]
    fn restriction_keeps_original_order() {
        let d = toy()
            .restrict_to_classes(&[ClassId(9), ClassId(5)])
            .unwrap();
        assert_eq!(d.labels(), &[ClassId(5), ClassId(5), ClassId(9)]);
        assert_eq!(d.sample(1), &[1.0, 1.0]);
        assert!(toy().restrict_to_classes(&[ClassId(3)]).is_err());
        assert!(toy().restrict_to_classes(&[]).is_err());
    }

    #[test]
    fn label_count_must_match() {
        let x = DenseMatrix::<f64>::identity(2).unwrap();
        assert!(Dataset::new(x, vec![ClassId(0)]).is_err());
    }
}
