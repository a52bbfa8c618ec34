use crate::error::{Error, Result};
use crate::scalar::{axpy, dot, Scalar};

/// Dense column-major matrix. Columns are samples (dictionary atoms), rows
/// are feature dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> DenseMatrix<T> {
    /// Builds a matrix from column-major storage, rejecting empty shapes and
    /// non-finite entries.
    pub fn from_col_major(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid(format!(
                "matrix must be non-empty, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::invalid(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "non-finite entry at row {}, column {}",
                pos % rows,
                pos / rows
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_row_major(rows: usize, cols: usize, data: &[T]) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::invalid(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        let mut col_major = Vec::with_capacity(data.len());
        for j in 0..cols {
            col_major.extend((0..rows).map(|i| data[i * cols + j]));
        }
        Self::from_col_major(rows, cols, col_major)
    }

    pub fn from_columns<C: AsRef<[T]>>(columns: &[C]) -> Result<Self> {
        let rows = columns.first().map_or(0, |c| c.as_ref().len());
        let mut data = Vec::with_capacity(rows * columns.len());
        for (j, c) in columns.iter().enumerate() {
            let c = c.as_ref();
            if c.len() != rows {
                return Err(Error::invalid(format!(
                    "column {j} has length {}, expected {rows}",
                    c.len()
                )));
            }
            data.extend_from_slice(c);
        }
        Self::from_col_major(rows, columns.len(), data)
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut data = vec![T::zero(); n * n];
        for i in 0..n {
            data[i * n + i] = T::one();
        }
        Self::from_col_major(n, n, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_col_major(&self) -> &[T] {
        &self.data
    }

    pub fn get(&self, row: usize, col: usize) -> T {
        self.data[col * self.rows + row]
    }

    pub fn column(&self, j: usize) -> &[T] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[T]> + '_ {
        self.data.chunks_exact(self.rows)
    }

    pub(crate) fn column_mut(&mut self, j: usize) -> &mut [T] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    /// New matrix made of the given columns, in the given order.
    pub fn select_columns(&self, indices: &[usize]) -> Result<Self> {
        let mut data = Vec::with_capacity(self.rows * indices.len());
        for &j in indices {
            if j >= self.cols {
                return Err(Error::invalid(format!(
                    "column index {j} out of range for {} columns",
                    self.cols
                )));
            }
            data.extend_from_slice(self.column(j));
        }
        Self::from_col_major(self.rows, indices.len(), data)
    }

    /// `A x`
    pub fn mul_vec(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.cols {
            return Err(Error::invalid(format!(
                "vector of length {} cannot multiply {}x{} matrix",
                x.len(),
                self.rows,
                self.cols
            )));
        }
        let mut out = vec![T::zero(); self.rows];
        for (col, &xj) in self.columns().zip(x) {
            if xj != T::zero() {
                axpy(xj, col, &mut out);
            }
        }
        Ok(out)
    }

    /// `Aᵀ y`
    pub fn tr_mul_vec(&self, y: &[T]) -> Result<Vec<T>> {
        if y.len() != self.rows {
            return Err(Error::invalid(format!(
                "vector of length {} does not match {} matrix rows",
                y.len(),
                self.rows
            )));
        }
        Ok(self.columns().map(|col| dot(col, y)).collect())
    }

    /// `AᵀA`, symmetric, computed once per pair and mirrored.
    pub fn gram(&self) -> Self {
        let m = self.cols;
        let mut data = vec![T::zero(); m * m];
        for j in 0..m {
            let cj = self.column(j);
            for i in 0..=j {
                let v = dot(self.column(i), cj);
                data[j * m + i] = v;
                data[i * m + j] = v;
            }
        }
        Self {
            rows: m,
            cols: m,
            data,
        }
    }

    /// The square submatrix on rows and columns `idx`.
    pub(crate) fn principal_submatrix(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * idx.len());
        for &j in idx {
            let col = self.column(j);
            data.extend(idx.iter().map(|&i| col[i]));
        }
        Self {
            rows: idx.len(),
            cols: idx.len(),
            data,
        }
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for i in 0..self.rows {
            data.extend(self.columns().map(|c| c[i]));
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    /// Orthonormalizes the columns in place with modified Gram-Schmidt.
    /// Fails if the columns are numerically dependent.
    pub fn orthonormalize_columns(&mut self) -> Result<()> {
        if self.cols > self.rows {
            return Err(Error::invalid(format!(
                "cannot orthonormalize {} columns in dimension {}",
                self.cols, self.rows
            )));
        }
        let tiny = T::epsilon().sqrt();
        for j in 0..self.cols {
            for k in 0..j {
                let (head, tail) = self.data.split_at_mut(j * self.rows);
                let qk = &head[k * self.rows..(k + 1) * self.rows];
                let vj = &mut tail[..self.rows];
                let proj = dot(qk, vj);
                axpy(-proj, qk, vj);
            }
            let col = self.column_mut(j);
            let norm = dot(col, col).sqrt();
            if norm <= tiny {
                return Err(Error::NumericalFailure(format!(
                    "column {j} is linearly dependent on earlier columns"
                )));
            }
            col.iter_mut().for_each(|v| *v /= norm);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_and_column_major_agree() {
        let a = DenseMatrix::from_row_major(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        assert_eq!(a.column(0), &[1.0, 4.0]);
        assert_eq!(a.column(2), &[3.0, 6.0]);
        assert_eq!(a.get(1, 1), 5.0);
        assert_eq!(a.transpose().column(1), &[4.0, 5.0, 6.0]);
    }

    #[test]
    fn products() {
        let a = DenseMatrix::from_row_major(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        assert_eq!(a.mul_vec(&[1.0, 0.0, -1.0]).unwrap(), vec![-2.0, -2.0]);
        assert_eq!(a.tr_mul_vec(&[1.0, 1.0]).unwrap(), vec![5.0, 7.0, 9.0]);
        let g = a.gram();
        assert_eq!(g.column(0), &[17.0, 22.0, 27.0]);
        assert_eq!(g.get(2, 2), 45.0);
        assert!(a.mul_vec(&[1.0]).is_err());
        assert!(a.tr_mul_vec(&[1.0]).is_err());
    }

    #[test]
    fn rejects_bad_shapes_and_values() {
        assert!(DenseMatrix::<f64>::from_col_major(0, 1, vec![]).is_err());
        assert!(DenseMatrix::from_col_major(1, 2, vec![1.0]).is_err());
        assert!(DenseMatrix::from_col_major(1, 2, vec![1.0, f64::NAN]).is_err());
        assert!(DenseMatrix::from_columns(&[vec![1.0], vec![1.0, 2.0]]).is_err());
    }

    #[test]
    fn gram_schmidt_gives_orthonormal_columns() {
        let mut a = DenseMatrix::from_row_major(3, 2, &[1.0, 1.0, 1.0, 0.0, 0.0, 2.0_f64]).unwrap();
        a.orthonormalize_columns().unwrap();
        let g = a.gram();
        assert!((g.get(0, 0) - 1.0).abs() < 1e-14);
        assert!((g.get(1, 1) - 1.0).abs() < 1e-14);
        assert!(g.get(0, 1).abs() < 1e-14);

        let mut dep = DenseMatrix::from_columns(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(dep.orthonormalize_columns().is_err());
    }
}
