use crate::error::{Error, Result};
use crate::linsolve::cholesky::Cholesky;
use crate::linsolve::{check_query, CoefficientVector, DenseMatrix};
use crate::scalar::Scalar;

fn regularized_gram<T: Scalar>(dict: &DenseMatrix<T>, l2_penalty: T) -> Result<Cholesky<T>> {
    check_penalty(l2_penalty)?;
    factor_shifted(dict.gram(), l2_penalty)
}

fn check_penalty<T: Scalar>(l2_penalty: T) -> Result<()> {
    if !(l2_penalty > T::zero()) || !l2_penalty.is_finite() {
        return Err(Error::invalid(format!(
            "l2_penalty must be positive and finite, got {l2_penalty}"
        )));
    }
    Ok(())
}

fn factor_shifted<T: Scalar>(mut gram: DenseMatrix<T>, l2_penalty: T) -> Result<Cholesky<T>> {
    for i in 0..gram.cols() {
        gram.column_mut(i)[i] += l2_penalty;
    }
    Cholesky::factor(&gram)
}

/// `(XᵀX + λI)⁻¹ Xᵀ y`, via a Cholesky factorization of the `m × m`
/// regularized Gram matrix.
pub fn solve_ridge<T: Scalar>(
    dict: &DenseMatrix<T>,
    query: &[T],
    l2_penalty: T,
) -> Result<CoefficientVector<T>> {
    check_query(dict, query)?;
    let chol = regularized_gram(dict, l2_penalty)?;
    let mut rhs = dict.tr_mul_vec(query)?;
    chol.solve_in_place(&mut rhs);
    Ok(CoefficientVector::new(rhs))
}

/// Precomputed `P = (XᵀX + λI)⁻¹ Xᵀ` (an `m × d` matrix) for one
/// dictionary, so each query costs a single matrix-vector product.
///
/// Immutable once built; share it freely across threads.
#[derive(Debug, Clone)]
pub struct RidgeProjector<T> {
    operator: DenseMatrix<T>,
    l2_penalty: T,
}

impl<T: Scalar> RidgeProjector<T> {
    pub fn apply(&self, query: &[T]) -> Result<CoefficientVector<T>> {
        if query.len() != self.operator.cols() {
            return Err(Error::invalid(format!(
                "query has length {}, projector expects {}",
                query.len(),
                self.operator.cols()
            )));
        }
        Ok(CoefficientVector::new(self.operator.mul_vec(query)?))
    }

    /// The `m × d` operator.
    pub fn operator(&self) -> &DenseMatrix<T> {
        &self.operator
    }

    pub fn l2_penalty(&self) -> T {
        self.l2_penalty
    }
}

pub fn ridge_projector<T: Scalar>(
    dict: &DenseMatrix<T>,
    l2_penalty: T,
) -> Result<RidgeProjector<T>> {
    let chol = regularized_gram(dict, l2_penalty)?;
    projector_from_factor(dict, &chol, l2_penalty)
}

/// As [`ridge_projector`], with `XᵀX` supplied by the caller.
pub(crate) fn ridge_projector_with_gram<T: Scalar>(
    dict: &DenseMatrix<T>,
    gram: DenseMatrix<T>,
    l2_penalty: T,
) -> Result<RidgeProjector<T>> {
    check_penalty(l2_penalty)?;
    if gram.rows() != dict.cols() || gram.cols() != dict.cols() {
        return Err(Error::invalid("Gram matrix does not match the dictionary"));
    }
    let chol = factor_shifted(gram, l2_penalty)?;
    projector_from_factor(dict, &chol, l2_penalty)
}

fn projector_from_factor<T: Scalar>(
    dict: &DenseMatrix<T>,
    chol: &Cholesky<T>,
    l2_penalty: T,
) -> Result<RidgeProjector<T>> {
    let (d, m) = (dict.rows(), dict.cols());
    // X's column-major storage is Xᵀ row-major: solve all d right-hand
    // sides of (XᵀX + λI) P = Xᵀ in one pass.
    let mut p = dict.as_col_major().to_vec();
    chol.solve_rows_in_place(&mut p, d);
    let operator = DenseMatrix::from_row_major(m, d, &p)
        .map_err(|_| Error::NumericalFailure("ridge projector overflowed".into()))?;
    Ok(RidgeProjector {
        operator,
        l2_penalty,
    })
}
