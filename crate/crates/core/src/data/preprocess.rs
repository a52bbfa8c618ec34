use crate::error::{Error, Result};
use crate::linsolve::DenseMatrix;
use crate::represent::Dataset;
use crate::scalar::{norm_sq, Scalar};

/// Scales every sample to unit L2 norm. All-zero samples are rejected.
pub fn normalize_columns<T: Scalar>(data: &Dataset<T>) -> Result<Dataset<T>> {
    let mut out = Vec::with_capacity(data.dim() * data.len());
    for (j, col) in data.features().columns().enumerate() {
        let norm = norm_sq(col).sqrt();
        if norm == T::zero() {
            return Err(Error::invalid(format!("sample {j} is all zeros")));
        }
        out.extend(col.iter().map(|&v| v / norm));
    }
    data.with_features(DenseMatrix::from_col_major(data.dim(), data.len(), out)?)
}

/// Non-overlapping `factor × factor` mean pooling of row-major
/// `height × width` images.
pub fn downsample_images<T: Scalar>(
    data: &Dataset<T>,
    height: usize,
    width: usize,
    factor: usize,
) -> Result<Dataset<T>> {
    if height * width != data.dim() {
        return Err(Error::invalid(format!(
            "{height}x{width} images need {} features, dataset has {}",
            height * width,
            data.dim()
        )));
    }
    if factor == 0 || !height.is_multiple_of(factor) || !width.is_multiple_of(factor) {
        return Err(Error::invalid(format!(
            "factor {factor} must divide both {height} and {width}"
        )));
    }
    let (oh, ow) = (height / factor, width / factor);
    let area = T::from_usize(factor * factor).expect("pool area fits in scalar");
    let mut out = Vec::with_capacity(oh * ow * data.len());
    for col in data.features().columns() {
        for r in 0..oh {
            for c in 0..ow {
                let mut sum = T::zero();
                for dr in 0..factor {
                    let row = (r * factor + dr) * width + c * factor;
                    sum += col[row..row + factor].iter().copied().sum::<T>();
                }
                out.push(sum / area);
            }
        }
    }
    data.with_features(DenseMatrix::from_col_major(oh * ow, data.len(), out)?)
}
