#![allow(dead_code)]

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use tsstss::{ClassId, Dataset, DenseMatrix};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_vec(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

/// Random `d × m` dictionary with unit-norm Gaussian columns, returned both
/// as a library matrix and as plain columns for the oracles.
pub fn unit_dictionary(
    rng: &mut impl Rng,
    d: usize,
    m: usize,
) -> (DenseMatrix<f64>, Vec<Vec<f64>>) {
    let cols: Vec<Vec<f64>> = (0..m)
        .map(|_| {
            let v = gaussian_vec(rng, d);
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.into_iter().map(|x| x / n).collect()
        })
        .collect();
    (DenseMatrix::from_columns(&cols).unwrap(), cols)
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Three classes on mutually orthogonal coordinate blocks of `R^9`, three
/// unit samples per class.
pub fn orthogonal_three_class(rng: &mut impl Rng) -> Dataset<f64> {
    let mut cols = Vec::new();
    let mut labels = Vec::new();
    for class in 0..3u32 {
        for _ in 0..3 {
            let mut v = vec![0.0; 9];
            let block = gaussian_vec(rng, 3);
            let n = block.iter().map(|x| x * x).sum::<f64>().sqrt();
            for (k, b) in block.iter().enumerate() {
                v[class as usize * 3 + k] = b / n;
            }
            cols.push(v);
            labels.push(ClassId(class));
        }
    }
    Dataset::from_columns(&cols, labels).unwrap()
}
