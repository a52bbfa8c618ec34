//! Deliberately naive reference algorithms for cross-checking the library.
//!
//! Nothing here shares code with `tsstss`: matrices are plain `Vec` columns,
//! the lasso is solved by proximal gradient instead of coordinate descent,
//! the ridge problem by gradient descent instead of a factorization, and the
//! subspace classifier uses a Jacobi eigensolver.

pub type Columns = [Vec<f64>];

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn reconstruct(cols: &Columns, coef: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; cols[0].len()];
    for (c, &w) in cols.iter().zip(coef) {
        for (o, v) in out.iter_mut().zip(c) {
            *o += w * v;
        }
    }
    out
}

/// `Xᵀ(Xθ − y)`
fn gradient(cols: &Columns, y: &[f64], coef: &[f64]) -> Vec<f64> {
    let mut r = reconstruct(cols, coef);
    for (ri, yi) in r.iter_mut().zip(y) {
        *ri -= yi;
    }
    cols.iter().map(|c| dot(c, &r)).collect()
}

/// Largest eigenvalue of `XᵀX` by power iteration on `XᵀX v`.
pub fn gram_spectral_norm(cols: &Columns) -> f64 {
    let m = cols.len();
    let mut v: Vec<f64> = (0..m).map(|i| 1.0 + (i as f64) * 1e-3).collect();
    let mut lambda = 0.0;
    for _ in 0..5000 {
        let xv = reconstruct(cols, &v);
        let w: Vec<f64> = cols.iter().map(|c| dot(c, &xv)).collect();
        let norm = dot(&w, &w).sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        let next = dot(&v, &w) / dot(&v, &v);
        v = w.iter().map(|x| x / norm).collect();
        if (next - lambda).abs() <= 1e-15 * next.abs() {
            lambda = next;
            break;
        }
        lambda = next;
    }
    lambda
}

/// Proximal gradient (ISTA) for `½‖y − Xθ‖² + α‖θ‖₁` with step `1/L`.
///
/// Runs `iterations` steps, stopping early only once an update moves no
/// coefficient by more than `1e-15`.
pub fn lasso_prox_gradient(cols: &Columns, y: &[f64], alpha: f64, iterations: usize) -> Vec<f64> {
    let step = 1.0 / gram_spectral_norm(cols);
    let mut theta = vec![0.0; cols.len()];
    for _ in 0..iterations {
        let g = gradient(cols, y, &theta);
        let mut moved = 0.0_f64;
        for (t, gi) in theta.iter_mut().zip(&g) {
            let z = *t - step * gi;
            let thr = step * alpha;
            let next = if z > thr {
                z - thr
            } else if z < -thr {
                z + thr
            } else {
                0.0
            };
            moved = moved.max((next - *t).abs());
            *t = next;
        }
        if moved <= 1e-15 {
            break;
        }
    }
    theta
}

fn soft(z: f64, thr: f64) -> f64 {
    if z > thr {
        z - thr
    } else if z < -thr {
        z + thr
    } else {
        0.0
    }
}

/// Accelerated proximal gradient (FISTA) for the same objective, with
/// gradient-based momentum restart. Stops early once an update moves no
/// coefficient by more than `1e-15`.
pub fn lasso_fista(cols: &Columns, y: &[f64], alpha: f64, iterations: usize) -> Vec<f64> {
    let step = 1.0 / gram_spectral_norm(cols);
    let thr = step * alpha;
    let mut x = vec![0.0; cols.len()];
    let mut z = x.clone();
    let mut t = 1.0_f64;
    for _ in 0..iterations {
        let g = gradient(cols, y, &z);
        let next: Vec<f64> = z
            .iter()
            .zip(&g)
            .map(|(zi, gi)| soft(zi - step * gi, thr))
            .collect();
        let moved = next
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        // Restart when the momentum points uphill.
        let uphill: f64 = z
            .iter()
            .zip(&next)
            .zip(&x)
            .map(|((zi, ni), xi)| (zi - ni) * (ni - xi))
            .sum();
        let t_next = if uphill > 0.0 {
            1.0
        } else {
            (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0
        };
        let beta = if uphill > 0.0 {
            0.0
        } else {
            (t - 1.0) / t_next
        };
        z = next
            .iter()
            .zip(&x)
            .map(|(ni, xi)| ni + beta * (ni - xi))
            .collect();
        x = next;
        t = t_next;
        if moved <= 1e-15 {
            break;
        }
    }
    x
}

/// Gradient descent on `‖y − Xw‖² + λ‖w‖²` until the gradient norm drops to
/// `grad_tol` (or `max_iter` steps).
pub fn ridge_gradient_descent(
    cols: &Columns,
    y: &[f64],
    lambda: f64,
    grad_tol: f64,
    max_iter: usize,
) -> Vec<f64> {
    let lip = 2.0 * (gram_spectral_norm(cols) + lambda);
    let step = 1.0 / lip;
    let mut w = vec![0.0; cols.len()];
    for _ in 0..max_iter {
        let g: Vec<f64> = gradient(cols, y, &w)
            .iter()
            .zip(&w)
            .map(|(gi, wi)| 2.0 * gi + 2.0 * lambda * wi)
            .collect();
        if dot(&g, &g).sqrt() <= grad_tol {
            break;
        }
        for (wi, gi) in w.iter_mut().zip(&g) {
            *wi -= step * gi;
        }
    }
    w
}

/// Eigen-decomposition of a symmetric matrix (row-major `n × n`) by cyclic
/// Jacobi rotations. Returns eigenpairs sorted by descending eigenvalue.
pub fn symmetric_eigen(a: &[f64], n: usize) -> Vec<(f64, Vec<f64>)> {
    let mut a = a.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum();
        if off < 1e-26 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut pairs: Vec<(f64, Vec<f64>)> = (0..n)
        .map(|j| (a[j * n + j], (0..n).map(|i| v[i * n + j]).collect()))
        .collect();
    pairs.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap());
    pairs
}

/// Orthonormal basis of the dominant `rank`-dimensional subspace spanned by
/// `samples` (top eigenvectors of their scatter matrix).
pub fn principal_subspace(samples: &Columns, rank: usize) -> Vec<Vec<f64>> {
    let d = samples[0].len();
    let mut scatter = vec![0.0; d * d];
    for s in samples {
        for i in 0..d {
            for j in 0..d {
                scatter[i * d + j] += s[i] * s[j];
            }
        }
    }
    symmetric_eigen(&scatter, d)
        .into_iter()
        .take(rank)
        .map(|(_, v)| v)
        .collect()
}

/// Distance from `y` to the span of an orthonormal `basis`.
pub fn projection_residual(basis: &Columns, y: &[f64]) -> f64 {
    let mut r = y.to_vec();
    for b in basis {
        let c = dot(b, y);
        for (ri, bi) in r.iter_mut().zip(b) {
            *ri -= c * bi;
        }
    }
    dot(&r, &r).sqrt()
}

/// Nearest-subspace classifier: index of the class whose basis leaves the
/// smallest projection residual (first index on ties).
pub fn nearest_subspace(bases: &[Vec<Vec<f64>>], y: &[f64]) -> usize {
    let mut best = (0, f64::INFINITY);
    for (k, b) in bases.iter().enumerate() {
        let r = projection_residual(b, y);
        if r < best.1 {
            best = (k, r);
        }
    }
    best.0
}
