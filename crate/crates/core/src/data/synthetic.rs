use rand_distr::{Distribution, StandardNormal};

use crate::data::seeded_rng;
use crate::error::{Error, Result};
use crate::linsolve::DenseMatrix;
use crate::represent::{ClassId, Dataset};
use crate::scalar::Scalar;

/// Union-of-subspaces generator: each class lives near its own random
/// `subspace_dim`-dimensional subspace of `R^ambient_dim`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    pub classes: usize,
    pub subspace_dim: usize,
    pub ambient_dim: usize,
    pub train_per_class: usize,
    pub test_per_class: usize,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("classes", self.classes),
            ("subspace_dim", self.subspace_dim),
            ("ambient_dim", self.ambient_dim),
            ("train_per_class", self.train_per_class),
            ("test_per_class", self.test_per_class),
        ];
        if let Some((name, _)) = counts.iter().find(|(_, v)| *v == 0) {
            return Err(Error::invalid(format!("{name} must be at least 1")));
        }
        if self.subspace_dim > self.ambient_dim {
            return Err(Error::invalid(format!(
                "subspace_dim {} exceeds ambient_dim {}",
                self.subspace_dim, self.ambient_dim
            )));
        }
        if !(self.noise_sigma >= 0.0) || !self.noise_sigma.is_finite() {
            return Err(Error::invalid(format!(
                "noise_sigma must be finite and nonnegative, got {}",
                self.noise_sigma
            )));
        }
        if u32::try_from(self.classes).is_err() {
            return Err(Error::invalid("too many classes"));
        }
        Ok(())
    }
}

/// Returns `(train, test)`; class ids are `0..classes`. For each class in
/// turn the generator draws a Gaussian `ambient × subspace` matrix,
/// orthonormalizes it, then draws the train samples followed by the test
/// samples as `basis · c + σ · noise` with standard-normal `c` and noise.
pub fn generate_synthetic<T: Scalar>(spec: &SyntheticSpec) -> Result<(Dataset<T>, Dataset<T>)> {
    spec.validate()?;
    let mut rng = seeded_rng(spec.seed);
    let d = spec.ambient_dim;
    let sigma = spec.noise_sigma;
    let (mut train_cols, mut test_cols) = (Vec::new(), Vec::new());
    let (mut train_labels, mut test_labels) = (Vec::new(), Vec::new());

    for class in 0..spec.classes {
        let raw: Vec<f64> = (0..d * spec.subspace_dim)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        let mut basis = DenseMatrix::from_col_major(d, spec.subspace_dim, raw)?;
        basis.orthonormalize_columns()?;

        let label = ClassId(class as u32);
        for k in 0..spec.train_per_class + spec.test_per_class {
            let coef: Vec<f64> = (0..spec.subspace_dim)
                .map(|_| StandardNormal.sample(&mut rng))
                .collect();
            let mut x = basis.mul_vec(&coef)?;
            if sigma > 0.0 {
                for v in &mut x {
                    let n: f64 = StandardNormal.sample(&mut rng);
                    *v += sigma * n;
                }
            }
            let x: Vec<T> = x.into_iter().map(T::lit).collect();
            if k < spec.train_per_class {
                train_cols.push(x);
                train_labels.push(label);
            } else {
                test_cols.push(x);
                test_labels.push(label);
            }
        }
    }
    Ok((
        Dataset::from_columns(&train_cols, train_labels)?,
        Dataset::from_columns(&test_cols, test_labels)?,
    ))
}
