use crate::error::{Error, Result};
use crate::linsolve::cholesky::Cholesky;
use crate::linsolve::{check_query, CoefficientVector, DenseMatrix, SolverConfig};
use crate::scalar::{axpy, dot, norm_sq, Scalar};

/// Support-only sweeps between two full sweeps.
const SUPPORT_SWEEPS: usize = 10;
/// Full sweeps after which a support step is taken even if coordinate
/// descent keeps changing the sign pattern.
const FORCE_STEP_AFTER: usize = 16;

/// Soft-thresholding operator. `|z| == t` maps to zero.
fn soft_threshold<T: Scalar>(z: T, t: T) -> T {
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        T::zero()
    }
}

/// Minimizes `½‖y − Xθ‖₂² + α‖θ‖₁` by cyclic coordinate descent.
///
/// Sweeps alternate between the full coordinate set and the current support
/// until a full sweep changes no coefficient by more than `cfg.tolerance`
/// and the KKT violation of the iterate is below `cfg.tolerance` as well.
/// Once a full sweep leaves the sign pattern unchanged (or every
/// `FORCE_STEP_AFTER` full sweeps), feature-sign steps jump to the exact
/// minimizer on the current support; with more support atoms than
/// dimensions, dependent atoms are dropped first. This is what makes badly
/// conditioned dictionaries (many near-collinear atoms) converge in tens of
/// sweeps rather than thousands.
/// Every sweep, full or support-only, counts against `cfg.max_iterations`.
pub fn solve_lasso<T: Scalar>(
    dict: &DenseMatrix<T>,
    query: &[T],
    cfg: &SolverConfig<T>,
) -> Result<CoefficientVector<T>> {
    check_query(dict, query)?;
    cfg.validate()?;
    let alpha = cfg.l1_penalty;
    let tol = cfg.tolerance;
    let m = dict.cols();

    let correlations = dict.tr_mul_vec(query)?;
    let max_corr = correlations.iter().fold(T::zero(), |a, c| a.max(c.abs()));
    if max_corr <= alpha {
        return Ok(CoefficientVector::zeros(m));
    }

    let norms: Vec<T> = dict.columns().map(norm_sq).collect();
    let mut theta = vec![T::zero(); m];
    let mut residual = query.to_vec();

    let update = |j: usize, theta: &mut [T], residual: &mut [T]| -> T {
        let nj = norms[j];
        if nj == T::zero() {
            return T::zero();
        }
        let col = dict.column(j);
        let old = theta[j];
        let rho = dot(col, residual) + nj * old;
        let new = soft_threshold(rho, alpha) / nj;
        let delta = new - old;
        if delta != T::zero() {
            axpy(-delta, col, residual);
            theta[j] = new;
        }
        delta.abs()
    };

    let mut sweeps = 0;
    let mut polished: Vec<(usize, bool)> = Vec::new();
    let mut since_step = 0;
    while sweeps < cfg.max_iterations {
        let before = sign_pattern(&theta);
        let mut max_change = T::zero();
        for j in 0..m {
            max_change = max_change.max(update(j, &mut theta, &mut residual));
        }
        sweeps += 1;

        if max_change < tol && violation(dict, query, &theta, alpha) <= tol {
            return Ok(CoefficientVector::new(theta));
        }

        let mut pattern = sign_pattern(&theta);
        let stalled = pattern == before;
        // Coordinate descent shrinks large supports quickly by itself; step
        // in only once it has stalled on one.
        if pattern.len() > dict.rows() && stalled {
            while pattern.len() > dict.rows()
                && drop_along_null_direction(dict, &pattern, &mut theta)
            {
                pattern = sign_pattern(&theta);
            }
            residual = residual_of(dict, query, &theta);
        }
        since_step += 1;
        if pattern != polished && (stalled || since_step >= FORCE_STEP_AFTER) {
            since_step = 0;
            let mut moved = false;
            // Every round strictly lowers the objective on a shrinking or
            // re-signed support; the cap is only a backstop.
            for _ in 0..2 * dict.rows() + 2 {
                match support_step(dict, query, &pattern, alpha, &mut theta) {
                    Step::None => break,
                    Step::Moved => {
                        moved = true;
                        pattern = sign_pattern(&theta);
                    }
                    Step::Reached => {
                        moved = true;
                        break;
                    }
                }
            }
            if moved {
                residual = residual_of(dict, query, &theta);
                if violation(dict, query, &theta, alpha) <= tol {
                    return Ok(CoefficientVector::new(theta));
                }
            }
            polished = sign_pattern(&theta);
            continue;
        }
        if max_change < tol {
            continue;
        }

        let support: Vec<usize> = (0..m).filter(|&j| theta[j] != T::zero()).collect();
        for _ in 0..SUPPORT_SWEEPS {
            if sweeps >= cfg.max_iterations {
                break;
            }
            let mut change = T::zero();
            for &j in &support {
                change = change.max(update(j, &mut theta, &mut residual));
            }
            sweeps += 1;
            if change < tol {
                break;
            }
        }
    }

    Err(Error::NotConverged {
        violation: violation(dict, query, &theta, alpha).to_f64_lossy(),
        iterate: theta.iter().map(|v| v.to_f64_lossy()).collect(),
        iterations: sweeps,
    })
}

fn sign_pattern<T: Scalar>(theta: &[T]) -> Vec<(usize, bool)> {
    theta
        .iter()
        .enumerate()
        .filter(|(_, t)| **t != T::zero())
        .map(|(j, t)| (j, *t > T::zero()))
        .collect()
}

/// With more atoms than dimensions the support columns are dependent. Along
/// a null vector `v` of `X_S` the fit is unchanged and the L1 term is linear,
/// so moving in the non-increasing direction until a coefficient reaches
/// zero shrinks the support without raising the objective.
fn drop_along_null_direction<T: Scalar>(
    dict: &DenseMatrix<T>,
    pattern: &[(usize, bool)],
    theta: &mut [T],
) -> bool {
    let (d, k) = (dict.rows(), pattern.len());
    let mut a: Vec<Vec<T>> = pattern
        .iter()
        .map(|&(j, _)| dict.column(j).to_vec())
        .collect();
    let scale = a.iter().flatten().fold(T::zero(), |m, v| m.max(v.abs()));
    let eps = T::epsilon() * T::lit(64.0) * scale;

    // Gaussian elimination with partial pivoting over the columns of X_S.
    let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, column)
    let mut free = None;
    for c in 0..k {
        let row = pivots.len();
        let best = (row..d).max_by(|&p, &q| {
            a[c][p]
                .abs()
                .partial_cmp(&a[c][q].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        match best {
            Some(p) if a[c][p].abs() > eps => {
                for col in a.iter_mut().skip(c) {
                    col.swap(row, p);
                }
                for i in row + 1..d {
                    let f = a[c][i] / a[c][row];
                    for col in a.iter_mut().skip(c) {
                        let v = col[row];
                        col[i] -= f * v;
                    }
                }
                pivots.push((row, c));
            }
            _ => {
                free = Some(c);
                break;
            }
        }
    }
    let Some(f) = free else {
        return false;
    };
    let mut v = vec![T::zero(); k];
    v[f] = T::one();
    for &(row, c) in pivots.iter().rev() {
        let mut s = -a[f][row];
        for &(_, c2) in pivots.iter().filter(|&&(_, c2)| c2 > c) {
            s -= a[c2][row] * v[c2];
        }
        v[c] = s / a[c][row];
    }

    let slope: T = pattern
        .iter()
        .zip(&v)
        .map(|(&(_, pos), &vi)| if pos { vi } else { -vi })
        .sum();
    if slope > T::zero() {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    let mut step = None::<(T, usize)>;
    for (i, (&(j, _), &vi)) in pattern.iter().zip(&v).enumerate() {
        if vi != T::zero() && (theta[j] > T::zero()) != (vi > T::zero()) {
            let t = -theta[j] / vi;
            if step.is_none_or(|(s, _)| t < s) {
                step = Some((t, i));
            }
        }
    }
    let Some((t, hit)) = step else {
        return false;
    };
    for (i, (&(j, _), &vi)) in pattern.iter().zip(&v).enumerate() {
        theta[j] = if i == hit {
            T::zero()
        } else {
            theta[j] + t * vi
        };
    }
    true
}

enum Step {
    /// Singular support system, or no descent along the segment.
    None,
    /// Descended, but a coefficient was zeroed or changed sign on the way.
    Moved,
    /// Landed on the support-restricted optimum.
    Reached,
}

/// Feature-sign step: moves `theta` toward the stationary point of the lasso
/// restricted to `pattern`'s support and signs, `X_SᵀX_S θ_S = X_Sᵀy − α s`,
/// stopping wherever on that segment the objective is lowest.
fn support_step<T: Scalar>(
    dict: &DenseMatrix<T>,
    query: &[T],
    pattern: &[(usize, bool)],
    alpha: T,
    theta: &mut [T],
) -> Step {
    let k = pattern.len();
    if k == 0 || k > dict.rows() {
        return Step::None;
    }
    let cols: Vec<&[T]> = pattern.iter().map(|&(j, _)| dict.column(j)).collect();
    let mut gram = vec![T::zero(); k * k];
    for a in 0..k {
        for b in a..k {
            let g = dot(cols[a], cols[b]);
            gram[a * k + b] = g;
            gram[b * k + a] = g;
        }
    }
    let Some(chol) = DenseMatrix::from_col_major(k, k, gram)
        .ok()
        .and_then(|g| Cholesky::factor(&g).ok())
    else {
        return Step::None;
    };
    let mut target: Vec<T> = cols
        .iter()
        .zip(pattern)
        .map(|(c, &(_, pos))| dot(c, query) - if pos { alpha } else { -alpha })
        .collect();
    chol.solve_in_place(&mut target);
    if target.iter().any(|v| !v.is_finite()) {
        return Step::None;
    }

    // Along θ(t) = θ + t(target − θ) the objective is convex and piecewise
    // quadratic, with kinks where a coordinate crosses zero. Take the best of
    // the kinks and the endpoint.
    let delta: Vec<T> = pattern
        .iter()
        .zip(&target)
        .map(|(&(j, _), &t)| t - theta[j])
        .collect();
    let residual = residual_of(dict, query, theta);
    let mut u = vec![T::zero(); dict.rows()];
    for (c, &dj) in cols.iter().zip(&delta) {
        axpy(dj, c, &mut u);
    }
    let (r0u, uu) = (dot(&residual, &u), norm_sq(&u));
    let half = T::lit(0.5);
    let objective = |t: T| -> T {
        let l1 = pattern
            .iter()
            .zip(&delta)
            .map(|(&(j, _), &dj)| (theta[j] + t * dj).abs())
            .sum::<T>();
        half * (t * t * uu - (t + t) * r0u) + alpha * l1
    };
    let mut best = (T::one(), objective(T::one()));
    for (&(j, _), &dj) in pattern.iter().zip(&delta) {
        if dj != T::zero() {
            let t = -theta[j] / dj;
            if t > T::zero() && t < T::one() {
                let f = objective(t);
                if f < best.1 {
                    best = (t, f);
                }
            }
        }
    }
    if !(best.1 < objective(T::zero())) {
        return Step::None;
    }
    let step = best.0;
    let mut consistent = true;
    for (&(j, pos), &dj) in pattern.iter().zip(&delta) {
        let crosses_here = dj != T::zero() && -theta[j] / dj == step;
        theta[j] = if crosses_here {
            T::zero()
        } else {
            theta[j] + step * dj
        };
        consistent &= theta[j] != T::zero() && (theta[j] > T::zero()) == pos;
    }
    if consistent {
        Step::Reached
    } else {
        Step::Moved
    }
}

fn residual_of<T: Scalar>(dict: &DenseMatrix<T>, query: &[T], theta: &[T]) -> Vec<T> {
    let mut residual = query.to_vec();
    for (col, &t) in dict.columns().zip(theta) {
        if t != T::zero() {
            axpy(-t, col, &mut residual);
        }
    }
    residual
}

/// Largest violation of the lasso first-order optimality conditions at
/// `theta`. With `g = −Xᵀ(y − Xθ)`: `|gⱼ + α·sign(θⱼ)|` on the support and
/// `max(0, |gⱼ| − α)` off it. Zero exactly at a minimizer.
pub fn kkt_violation<T: Scalar>(
    dict: &DenseMatrix<T>,
    query: &[T],
    theta: &CoefficientVector<T>,
    alpha: T,
) -> Result<T> {
    check_query(dict, query)?;
    if theta.len() != dict.cols() {
        return Err(Error::invalid(format!(
            "coefficient vector has length {}, dictionary has {} columns",
            theta.len(),
            dict.cols()
        )));
    }
    if !(alpha > T::zero()) {
        return Err(Error::invalid(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    Ok(violation(dict, query, theta.as_slice(), alpha))
}

fn violation<T: Scalar>(dict: &DenseMatrix<T>, query: &[T], theta: &[T], alpha: T) -> T {
    // Recomputed from scratch rather than reusing the solver's running
    // residual, which accumulates rounding drift.
    let residual = residual_of(dict, query, theta);
    dict.columns()
        .zip(theta)
        .map(|(col, &t)| {
            let g = -dot(col, &residual);
            if t != T::zero() {
                (g + alpha * t.signum()).abs()
            } else {
                (g.abs() - alpha).max(T::zero())
            }
        })
        .fold(T::zero(), T::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity2() -> DenseMatrix<f64> {
        DenseMatrix::identity(2).unwrap()
    }

    fn cfg(alpha: f64) -> SolverConfig<f64> {
        SolverConfig {
            l1_penalty: alpha,
            ..SolverConfig::default()
        }
    }

    #[test]
    fn soft_threshold_tie_goes_to_zero() {
        assert_eq!(soft_threshold(1.0, 1.0), 0.0);
        assert_eq!(soft_threshold(-1.0, 1.0), 0.0);
        assert_eq!(soft_threshold(3.0, 1.0), 2.0);
        assert_eq!(soft_threshold(-3.0, 1.0), -2.0);
    }

    #[test]
    fn orthonormal_design_is_soft_thresholding() {
        let theta = solve_lasso(&identity2(), &[3.0, 0.5], &cfg(1.0)).unwrap();
        assert_eq!(theta.as_slice(), &[2.0, 0.0]);
        let v = kkt_violation(&identity2(), &[3.0, 0.5], &theta, 1.0).unwrap();
        assert!(v <= 1e-15);
    }

    #[test]
    fn large_penalty_gives_exact_zero() {
        let x = DenseMatrix::from_row_major(2, 3, &[0.6, 0.0, 1.0, 0.8, 1.0, 0.0]).unwrap();
        let y = [0.3, -0.7];
        let max_corr = x
            .tr_mul_vec(&y)
            .unwrap()
            .iter()
            .fold(0.0_f64, |a, c: &f64| a.max(c.abs()));
        let theta = solve_lasso(&x, &y, &cfg(max_corr)).unwrap();
        assert!(theta.as_slice().iter().all(|&t| t == 0.0));
        assert_eq!(kkt_violation(&x, &y, &theta, max_corr).unwrap(), 0.0);
    }

    #[test]
    fn kkt_at_zero_is_excess_correlation() {
        let x = identity2();
        let y = [3.0, 0.5];
        let zero = CoefficientVector::zeros(2);
        let v = kkt_violation(&x, &y, &zero, 1.0).unwrap();
        assert_eq!(v, 2.0);
        assert_eq!(kkt_violation(&x, &y, &zero, 5.0).unwrap(), 0.0);
    }

    #[test]
    fn dimension_mismatch_is_invalid_input() {
        assert!(matches!(
            solve_lasso(&identity2(), &[1.0], &cfg(0.1)),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            kkt_violation(&identity2(), &[1.0, 2.0], &CoefficientVector::zeros(3), 0.1),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn iteration_budget_exhaustion_reports_iterate() {
        // Strongly correlated columns converge slowly under coordinate descent.
        let x = DenseMatrix::from_columns(&[vec![1.0, 0.0], vec![0.999, 0.0447]]).unwrap();
        let cfg = SolverConfig {
            l1_penalty: 1e-3,
            tolerance: 1e-14,
            max_iterations: 2,
            ..SolverConfig::default()
        };
        match solve_lasso(&x, &[0.5, 0.4], &cfg) {
            Err(Error::NotConverged {
                iterate,
                violation,
                iterations,
            }) => {
                assert_eq!(iterate.len(), 2);
                assert!(violation > 0.0);
                assert_eq!(iterations, 2);
            }
            other => panic!("expected NotConverged, got {other:?}"),
        }
    }

    #[test]
    fn runs_in_single_precision() {
        let x = DenseMatrix::<f32>::identity(2).unwrap();
        let cfg = SolverConfig {
            l1_penalty: 1.0_f32,
            tolerance: 1e-5,
            ..SolverConfig::default()
        };
        let theta = solve_lasso(&x, &[3.0, 0.5], &cfg).unwrap();
        assert_eq!(theta.as_slice(), &[2.0, 0.0]);
    }
}
