use crate::error::{Error, Result};
use crate::linsolve::CoefficientVector;
use crate::represent::{ClassId, Dataset};
use crate::scalar::{axpy, norm_sq, Scalar};

/// Per-class reconstruction error of a query, in ascending class order.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualVector<T> {
    classes: Vec<ClassId>,
    values: Vec<T>,
    squared: bool,
}

impl<T: Scalar> ResidualVector<T> {
    pub fn new(classes: Vec<ClassId>, values: Vec<T>, squared: bool) -> Result<Self> {
        if classes.len() != values.len() {
            return Err(Error::invalid(format!(
                "{} classes but {} residuals",
                classes.len(),
                values.len()
            )));
        }
        if let Some(v) = values
            .iter()
            .find(|v| !(**v >= T::zero()) || !v.is_finite())
        {
            return Err(Error::invalid(format!(
                "residuals must be finite and nonnegative, got {v}"
            )));
        }
        Ok(Self {
            classes,
            values,
            squared,
        })
    }

    pub fn classes(&self) -> &[ClassId] {
        &self.classes
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Squared norms (deviation form) rather than plain norms.
    pub fn is_squared(&self) -> bool {
        self.squared
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, id: ClassId) -> Option<T> {
        self.classes
            .iter()
            .position(|&c| c == id)
            .map(|i| self.values[i])
    }

    /// Class with the smallest residual; ties go to the lower class id.
    pub fn argmin(&self) -> Option<ClassId> {
        let mut best: Option<(ClassId, T)> = None;
        for (&c, &v) in self.classes.iter().zip(&self.values) {
            match best {
                Some((bc, bv)) if v > bv || (v == bv && c > bc) => {}
                _ => best = Some((c, v)),
            }
        }
        best.map(|(c, _)| c)
    }
}

/// Per-class confidence: mean residual minus the class's own residual.
/// Larger is better and the entries sum to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreVector<T> {
    classes: Vec<ClassId>,
    values: Vec<T>,
}

impl<T: Scalar> ScoreVector<T> {
    pub fn classes(&self) -> &[ClassId] {
        &self.classes
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, id: ClassId) -> Option<T> {
        self.classes
            .iter()
            .position(|&c| c == id)
            .map(|i| self.values[i])
    }

    /// Class with the highest score and that score; ties go to the lower
    /// class id.
    pub fn argmax(&self) -> Option<(ClassId, T)> {
        let mut best: Option<(ClassId, T)> = None;
        for (&c, &v) in self.classes.iter().zip(&self.values) {
            match best {
                Some((bc, bv)) if v < bv || (v == bv && c > bc) => {}
                _ => best = Some((c, v)),
            }
        }
        best
    }

    pub fn max(&self) -> Option<T> {
        self.values.iter().copied().reduce(T::max)
    }
}

/// Residual of `query` against each class's share of the reconstruction
/// `Xθ`: `‖y − Σᵢ θ_{j,i} x_{j,i}‖`, squared if requested.
pub fn class_residuals<T: Scalar>(
    coeffs: &CoefficientVector<T>,
    data: &Dataset<T>,
    query: &[T],
    squared: bool,
) -> Result<ResidualVector<T>> {
    if coeffs.len() != data.len() {
        return Err(Error::invalid(format!(
            "{} coefficients for {} samples",
            coeffs.len(),
            data.len()
        )));
    }
    if query.len() != data.dim() {
        return Err(Error::invalid(format!(
            "query has length {}, samples have {}",
            query.len(),
            data.dim()
        )));
    }
    let theta = coeffs.as_slice();
    let mut values = Vec::with_capacity(data.num_classes());
    let mut residual = vec![T::zero(); data.dim()];
    for group in data.classes() {
        residual.copy_from_slice(query);
        for &j in &group.columns {
            if theta[j] != T::zero() {
                axpy(-theta[j], data.sample(j), &mut residual);
            }
        }
        let sq = norm_sq(&residual);
        values.push(if squared { sq } else { sq.sqrt() });
    }
    ResidualVector::new(data.class_ids(), values, squared)
}

/// `score_j = (1/n) Σᵢ rᵢ − r_j` over the `n` entries of `residuals`.
pub fn confidence_scores<T: Scalar>(residuals: &ResidualVector<T>) -> Result<ScoreVector<T>> {
    if residuals.is_empty() {
        return Err(Error::invalid("cannot score an empty residual vector"));
    }
    let n = T::from_usize(residuals.len()).expect("class count fits in scalar");
    let mean = residuals.values().iter().copied().sum::<T>() / n;
    Ok(ScoreVector {
        classes: residuals.classes().to_vec(),
        values: residuals.values().iter().map(|&r| mean - r).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residuals(values: &[f64]) -> ResidualVector<f64> {
        let classes = (0..values.len() as u32).map(ClassId).collect();
        ResidualVector::new(classes, values.to_vec(), false).unwrap()
    }

    fn assert_close(a: &[f64], b: &[f64]) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() < 1e-12, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn scores_are_mean_minus_residual() {
        let s = confidence_scores(&residuals(&[1.0, 3.0, 5.0])).unwrap();
        assert_eq!(s.values(), &[2.0, 0.0, -2.0]);

        let s = confidence_scores(&residuals(&[0.2, 0.7, 0.4, 0.3])).unwrap();
        assert_close(s.values(), &[0.2, -0.3, 0.0, 0.1]);
        assert_eq!(s.argmax().unwrap().0, ClassId(0));

        let s = confidence_scores(&residuals(&[0.4; 5])).unwrap();
        assert!(s.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn empty_residuals_rejected() {
        let r = ResidualVector::<f64>::new(vec![], vec![], false).unwrap();
        assert!(matches!(confidence_scores(&r), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn residual_vector_rejects_negative_or_nan() {
        assert!(ResidualVector::new(vec![ClassId(0)], vec![-1.0], true).is_err());
        assert!(ResidualVector::new(vec![ClassId(0)], vec![f64::NAN], true).is_err());
    }

    #[test]
    fn ties_break_toward_lower_class_id() {
        let r = ResidualVector::new(
            vec![ClassId(1), ClassId(4), ClassId(7)],
            vec![0.5, 0.2, 0.2],
            false,
        )
        .unwrap();
        assert_eq!(r.argmin(), Some(ClassId(4)));
        let s = confidence_scores(&r).unwrap();
        assert_eq!(s.argmax().unwrap().0, ClassId(4));
    }

    #[test]
    fn residual_examples() {
        let data =
            Dataset::from_columns(&[[1.0, 0.0], [0.0, 1.0]], vec![ClassId(1), ClassId(2)]).unwrap();
        let y = [1.0, 1.0];
        let r = class_residuals(&CoefficientVector::new(vec![1.0, 1.0]), &data, &y, true).unwrap();
        assert_eq!(r.values(), &[1.0, 1.0]);
        assert!(r.is_squared());

        let r = class_residuals(&CoefficientVector::zeros(2), &data, &y, true).unwrap();
        assert_eq!(r.values(), &[2.0, 2.0]);

        let r = class_residuals(
            &CoefficientVector::new(vec![1.0, 0.0]),
            &data,
            &[1.0, 0.0],
            false,
        )
        .unwrap();
        assert_eq!(r.get(ClassId(1)), Some(0.0));
        assert_eq!(r.get(ClassId(2)), Some(1.0));
    }

    #[test]
    fn residual_dimension_checks() {
        let data = Dataset::from_columns(&[[1.0, 0.0]], vec![ClassId(0)]).unwrap();
        assert!(class_residuals(&CoefficientVector::zeros(2), &data, &[1.0, 0.0], true).is_err());
        assert!(class_residuals(&CoefficientVector::zeros(1), &data, &[1.0], true).is_err());
    }
}
