//! Dense solvers for the two coding problems: L1-penalized least squares
//! (lasso, via cyclic coordinate descent) and ridge regression (closed form
//! through a Cholesky factorization of the regularized Gram matrix).

mod cholesky;
mod lasso;
mod matrix;
mod ridge;

pub use lasso::{kkt_violation, solve_lasso};
pub use matrix::DenseMatrix;
pub(crate) use ridge::ridge_projector_with_gram;
pub use ridge::{ridge_projector, solve_ridge, RidgeProjector};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Coefficients of a query's linear representation over a dictionary, one
/// per dictionary column.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector<T>(Vec<T>);

impl<T: Scalar> CoefficientVector<T> {
    pub fn new(values: Vec<T>) -> Self {
        Self(values)
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![T::zero(); len])
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<T> {
        self.0
    }

    pub fn nonzeros(&self) -> usize {
        self.0.iter().filter(|v| **v != T::zero()).count()
    }
}

/// Penalties and stopping rule shared by the solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig<T> {
    /// Weight `α` of the L1 term in `½‖y − Xθ‖² + α‖θ‖₁`.
    pub l1_penalty: T,
    /// Ridge weight `λ` in `(XᵀX + λI)⁻¹Xᵀy`.
    pub l2_penalty: T,
    /// Lasso stops once a full sweep moves no coefficient by this much and
    /// the KKT violation is below it as well.
    pub tolerance: T,
    /// Maximum number of coordinate-descent sweeps.
    pub max_iterations: usize,
}

impl<T: Scalar> Default for SolverConfig<T> {
    fn default() -> Self {
        Self {
            l1_penalty: T::lit(0.01),
            l2_penalty: T::lit(1e-3),
            tolerance: T::lit(1e-7),
            max_iterations: 10_000,
        }
    }
}

impl<T: Scalar> SolverConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: T| {
            if v > T::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(format!(
                    "{name} must be positive and finite, got {v}"
                )))
            }
        };
        positive("l1_penalty", self.l1_penalty)?;
        positive("l2_penalty", self.l2_penalty)?;
        positive("tolerance", self.tolerance)?;
        if self.max_iterations == 0 {
            return Err(Error::invalid("max_iterations must be at least 1"));
        }
        Ok(())
    }
}

pub(crate) fn check_query<T: Scalar>(dict: &DenseMatrix<T>, query: &[T]) -> Result<()> {
    if query.len() != dict.rows() {
        return Err(Error::invalid(format!(
            "query has length {}, dictionary has {} rows",
            query.len(),
            dict.rows()
        )));
    }
    if query.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("query contains non-finite values"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid() {
        let cfg = SolverConfig::<f64>::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.l1_penalty, 0.01);
        assert_eq!(cfg.l2_penalty, 1e-3);
        assert_eq!(cfg.tolerance, 1e-7);
        assert_eq!(cfg.max_iterations, 10_000);
        SolverConfig::<f32>::default().validate().unwrap();
    }

    #[test]
    fn config_rejects_nonpositive_values() {
        let base = SolverConfig::<f64>::default();
        for cfg in [
            SolverConfig {
                l1_penalty: 0.0,
                ..base
            },
            SolverConfig {
                l2_penalty: -1.0,
                ..base
            },
            SolverConfig {
                tolerance: f64::NAN,
                ..base
            },
            SolverConfig {
                max_iterations: 0,
                ..base
            },
        ] {
            assert!(matches!(cfg.validate(), Err(Error::InvalidInput(_))));
        }
    }
}
