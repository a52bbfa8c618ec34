#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_vec(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

pub fn bench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bench"))
        .args(args)
        .output()
        .expect("bench binary runs")
}

pub fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

/// Writes `body` to `dir/name` and returns the path.
pub fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

/// A synthetic-source config writing into `out`.
pub fn synthetic_config(out: &str, methods: &str, sweep: &str, extra: &str) -> String {
    format!(
        r#"output = "{out}"
methods = [{methods}]

[dataset]
kind = "synthetic"
classes = 6
subspace_dim = 3
ambient_dim = 20
train_per_class = 8
test_per_class = 5
noise_sigma = 0.05
seed = 7

[split]
sweep = [{sweep}]
seed = 11
{extra}"#
    )
}

/// Rows of `label,features...`: `classes` Gaussian clusters in `dim`
/// dimensions with `per_class` samples each.
pub fn cluster_csv(seed: u64, classes: u32, per_class: usize, dim: usize) -> String {
    let mut r = rng(seed);
    let centers: Vec<Vec<f64>> = (0..classes).map(|_| gaussian_vec(&mut r, dim)).collect();
    let mut out = String::new();
    for (c, center) in centers.iter().enumerate() {
        for _ in 0..per_class {
            let noise = gaussian_vec(&mut r, dim);
            let row: Vec<String> = center
                .iter()
                .zip(&noise)
                .map(|(a, b)| format!("{}", a + 0.2 * b))
                .collect();
            out.push_str(&format!("{c},{}\n", row.join(",")));
        }
    }
    out
}
