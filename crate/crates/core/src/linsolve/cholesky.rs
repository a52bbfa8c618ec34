use crate::error::{Error, Result};
use crate::linsolve::DenseMatrix;
use crate::scalar::{axpy, Scalar};

/// Lower-triangular Cholesky factor `L` of a symmetric positive-definite
/// matrix, `A = L Lᵀ`. Stored column-major, upper part unused.
#[derive(Debug, Clone)]
pub(crate) struct Cholesky<T> {
    n: usize,
    l: Vec<T>,
}

impl<T: Scalar> Cholesky<T> {
    pub(crate) fn factor(a: &DenseMatrix<T>) -> Result<Self> {
        let n = a.rows();
        if a.cols() != n {
            return Err(Error::invalid(format!(
                "Cholesky needs a square matrix, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        let mut l = a.as_col_major().to_vec();
        // Left-looking, so every inner update runs down a contiguous column.
        for j in 0..n {
            let (done, rest) = l.split_at_mut(j * n);
            let col = &mut rest[j..n];
            for k in 0..j {
                let ljk = done[k * n + j];
                if ljk != T::zero() {
                    axpy(-ljk, &done[k * n + j..(k + 1) * n], col);
                }
            }
            let d = col[0];
            if !(d > T::zero()) || !d.is_finite() {
                return Err(Error::NumericalFailure(format!(
                    "matrix is not positive definite (pivot {j} = {d})"
                )));
            }
            let d = d.sqrt();
            col[0] = d;
            for v in &mut col[1..] {
                *v /= d;
            }
        }
        Ok(Self { n, l })
    }

    fn entry(&self, i: usize, j: usize) -> T {
        self.l[j * self.n + i]
    }

    /// Solves `A x = b` in place.
    pub(crate) fn solve_in_place(&self, b: &mut [T]) {
        self.solve_rows_in_place(b, 1);
    }

    /// Solves `A X = B` in place for `B` stored row-major with `width`
    /// columns, i.e. `width` right-hand sides at once.
    pub(crate) fn solve_rows_in_place(&self, b: &mut [T], width: usize) {
        let n = self.n;
        debug_assert_eq!(b.len(), n * width);
        // L Z = B
        for j in 0..n {
            let (head, tail) = b.split_at_mut((j + 1) * width);
            let row = &mut head[j * width..];
            let inv = T::one() / self.entry(j, j);
            row.iter_mut().for_each(|v| *v *= inv);
            for (i, target) in (j + 1..n).zip(tail.chunks_exact_mut(width)) {
                let lij = self.entry(i, j);
                if lij != T::zero() {
                    axpy(-lij, row, target);
                }
            }
        }
        // Lᵀ X = Z
        for i in (0..n).rev() {
            let (head, tail) = b.split_at_mut((i + 1) * width);
            let row = &mut head[i * width..];
            for (k, solved) in (i + 1..n).zip(tail.chunks_exact(width)) {
                let lki = self.entry(k, i);
                if lki != T::zero() {
                    axpy(-lki, solved, row);
                }
            }
            let inv = T::one() / self.entry(i, i);
            row.iter_mut().for_each(|v| *v *= inv);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_spd_system() {
        let a = DenseMatrix::from_row_major(3, 3, &[4.0, 2.0, 0.6, 2.0, 5.0, 1.0, 0.6, 1.0, 3.0])
            .unwrap();
        let x = [1.0_f64, -2.0, 0.5];
        let mut b = a.mul_vec(&x).unwrap();
        Cholesky::factor(&a).unwrap().solve_in_place(&mut b);
        for (bi, xi) in b.iter().zip(x) {
            assert!((bi - xi).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_indefinite() {
        let a = DenseMatrix::from_row_major(2, 2, &[1.0, 2.0, 2.0, 1.0]).unwrap();
        assert!(matches!(
            Cholesky::factor(&a),
            Err(Error::NumericalFailure(_))
        ));
    }

    #[test]
    fn many_right_hand_sides_match_single_solves() {
        let a = DenseMatrix::from_row_major(3, 3, &[4.0, 2.0, 0.6, 2.0, 5.0, 1.0, 0.6, 1.0, 3.0])
            .unwrap();
        let chol = Cholesky::factor(&a).unwrap();
        // Two right-hand sides, row-major.
        let mut both = vec![1.0_f64, 0.5, -2.0, 0.0, 0.3, 2.0];
        chol.solve_rows_in_place(&mut both, 2);
        for c in 0..2 {
            let mut one: Vec<f64> = (0..3)
                .map(|r| [1.0, 0.5, -2.0, 0.0, 0.3, 2.0][r * 2 + c])
                .collect();
            chol.solve_in_place(&mut one);
            for r in 0..3 {
                assert!((one[r] - both[r * 2 + c]).abs() < 1e-14);
            }
        }
    }
}
