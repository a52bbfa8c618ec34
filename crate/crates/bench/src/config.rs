//! Experiment configuration, read from TOML. Unknown keys are rejected so a
//! typo in a sweep or a parameter name fails loudly instead of silently
//! falling back to a default.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tsstss::data::SyntheticSpec;
use tsstss::{CandidateCount, PipelineConfig, SolverConfig};

use crate::error::{BenchError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Crc,
    Knn,
    Src,
    Tsstss,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Crc => "crc",
            Method::Knn => "knn",
            Method::Src => "src",
            Method::Tsstss => "tsstss",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "crc" => Ok(Method::Crc),
            "knn" => Ok(Method::Knn),
            "src" => Ok(Method::Src),
            "tsstss" => Ok(Method::Tsstss),
            other => Err(format!("unknown method {other:?} (src, crc, knn, tsstss)")),
        }
    }
}

/// Where samples come from. Sources with a separate test set are
/// "predivided": the sweep, if any, subsamples their training part.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum DatasetSource {
    Csv {
        path: PathBuf,
        #[serde(default)]
        test_path: Option<PathBuf>,
        #[serde(default)]
        header: bool,
    },
    Idx {
        images: PathBuf,
        labels: PathBuf,
        #[serde(default)]
        test_images: Option<PathBuf>,
        #[serde(default)]
        test_labels: Option<PathBuf>,
    },
    Synthetic {
        classes: usize,
        subspace_dim: usize,
        ambient_dim: usize,
        train_per_class: usize,
        test_per_class: usize,
        noise_sigma: f64,
        seed: u64,
    },
}

impl DatasetSource {
    pub fn is_predivided(&self) -> bool {
        match self {
            DatasetSource::Csv { test_path, .. } => test_path.is_some(),
            DatasetSource::Idx { test_images, .. } => test_images.is_some(),
            DatasetSource::Synthetic { .. } => true,
        }
    }

    pub fn synthetic_spec(&self) -> Option<SyntheticSpec> {
        match *self {
            DatasetSource::Synthetic {
                classes,
                subspace_dim,
                ambient_dim,
                train_per_class,
                test_per_class,
                noise_sigma,
                seed,
            } => Some(SyntheticSpec {
                classes,
                subspace_dim,
                ambient_dim,
                train_per_class,
                test_per_class,
                noise_sigma,
                seed,
            }),
            _ => None,
        }
    }

    /// Relative paths are taken relative to `base`.
    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        match self {
            DatasetSource::Csv {
                path, test_path, ..
            } => {
                fix(path);
                test_path.iter_mut().for_each(fix);
            }
            DatasetSource::Idx {
                images,
                labels,
                test_images,
                test_labels,
            } => {
                fix(images);
                fix(labels);
                test_images.iter_mut().for_each(fix);
                test_labels.iter_mut().for_each(fix);
            }
            DatasetSource::Synthetic { .. } => {}
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Preprocess {
    /// Keep at most this many samples per class (seeded by the split seed),
    /// applied before anything else.
    #[serde(default)]
    pub max_per_class: Option<usize>,
    /// Mean-pooling factor for image data; 1 or absent leaves it alone.
    #[serde(default)]
    pub downsample: Option<usize>,
    /// Image shape for downsampling. Defaults to a square image.
    #[serde(default)]
    pub image_height: Option<usize>,
    #[serde(default)]
    pub image_width: Option<usize>,
    #[serde(default = "yes")]
    pub normalize: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Split {
    /// Training samples per class at each sweep point. Required for
    /// sources without a separate test set.
    #[serde(default)]
    pub sweep: Option<Vec<usize>>,
    #[serde(default)]
    pub seed: u64,
}

/// `candidates = 5` or `candidates = "half"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Candidates {
    Fixed(usize),
    Named(CandidateName),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CandidateName {
    Half,
}

impl Default for Candidates {
    fn default() -> Self {
        Candidates::Named(CandidateName::Half)
    }
}

impl From<Candidates> for CandidateCount {
    fn from(c: Candidates) -> Self {
        match c {
            Candidates::Fixed(n) => CandidateCount::Fixed(n),
            Candidates::Named(CandidateName::Half) => CandidateCount::Half,
        }
    }
}

impl std::str::FromStr for Candidates {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s.eq_ignore_ascii_case("half") {
            return Ok(Candidates::Named(CandidateName::Half));
        }
        s.parse()
            .map(Candidates::Fixed)
            .map_err(|_| format!("expected a count or \"half\", got {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default = "Params::default_alpha")]
    pub alpha: f64,
    #[serde(default = "Params::default_lambda")]
    pub lambda: f64,
    #[serde(default = "Params::default_tolerance")]
    pub tolerance: f64,
    #[serde(default = "Params::default_max_iterations")]
    pub max_iterations: usize,
    #[serde(default)]
    pub candidates: Candidates,
    #[serde(default = "Params::default_knn_k")]
    pub knn_k: usize,
}

impl Params {
    fn default_alpha() -> f64 {
        SolverConfig::<f64>::default().l1_penalty
    }
    fn default_lambda() -> f64 {
        SolverConfig::<f64>::default().l2_penalty
    }
    fn default_tolerance() -> f64 {
        SolverConfig::<f64>::default().tolerance
    }
    fn default_max_iterations() -> usize {
        SolverConfig::<f64>::default().max_iterations
    }
    fn default_knn_k() -> usize {
        1
    }

    pub fn solver(&self) -> SolverConfig<f64> {
        SolverConfig {
            l1_penalty: self.alpha,
            l2_penalty: self.lambda,
            tolerance: self.tolerance,
            max_iterations: self.max_iterations,
        }
    }

    pub fn pipeline(&self) -> PipelineConfig<f64> {
        PipelineConfig {
            solver: self.solver(),
            num_candidates: self.candidates.into(),
        }
    }
}

impl Default for Params {
    fn default() -> Self {
        Self {
            alpha: Self::default_alpha(),
            lambda: Self::default_lambda(),
            tolerance: Self::default_tolerance(),
            max_iterations: Self::default_max_iterations(),
            candidates: Candidates::default(),
            knn_k: Self::default_knn_k(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportOptions {
    /// Write wall-clock seconds into results.csv. Off by default so that
    /// reruns produce byte-identical files; summary.txt always has timings.
    #[serde(default)]
    pub timing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub output: PathBuf,
    pub methods: Vec<Method>,
    pub dataset: DatasetSource,
    #[serde(default)]
    pub preprocess: Preprocess,
    #[serde(default)]
    pub split: Split,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub report: ReportOptions,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| BenchError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file; relative paths inside it are resolved against
    /// the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| BenchError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg: Self = toml::from_str(&text)
            .map_err(|e| BenchError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.dataset.resolve_paths(base);
        if cfg.output.is_relative() {
            cfg.output = base.join(&cfg.output);
        }
        cfg.validate()
            .map_err(|e| BenchError::Config(format!("{}: {e}", path.display())))?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(BenchError::Config(msg));
        if self.methods.is_empty() {
            return bad("methods: must name at least one of src, crc, knn, tsstss".into());
        }
        let mut seen = self.methods.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.methods.len() {
            return bad("methods: duplicate entry".into());
        }
        match &self.split.sweep {
            Some(sweep) => {
                if sweep.is_empty() {
                    return bad("split.sweep: must not be empty".into());
                }
                if sweep.contains(&0) {
                    return bad("split.sweep: values must be at least 1".into());
                }
                if sweep.windows(2).any(|w| w[0] >= w[1]) {
                    return bad(format!(
                        "split.sweep: must be strictly increasing, got {sweep:?}"
                    ));
                }
            }
            None if !self.dataset.is_predivided() => {
                return bad(
                    "split.sweep: required when the dataset has no separate test set".into(),
                );
            }
            None => {}
        }
        if let DatasetSource::Idx {
            test_images,
            test_labels,
            ..
        } = &self.dataset
        {
            if test_images.is_some() != test_labels.is_some() {
                return bad("dataset: test_images and test_labels go together".into());
            }
        }
        if let Some(spec) = self.dataset.synthetic_spec() {
            spec.validate()
                .map_err(|e| BenchError::Config(format!("dataset: {e}")))?;
        }
        if self.preprocess.max_per_class == Some(0) {
            return bad("preprocess.max_per_class: must be at least 1".into());
        }
        if self.preprocess.downsample == Some(0) {
            return bad("preprocess.downsample: must be at least 1".into());
        }
        self.params
            .solver()
            .validate()
            .map_err(|e| BenchError::Config(format!("params: {e}")))?;
        if self.params.knn_k == 0 {
            return bad("params.knn_k: must be at least 1".into());
        }
        if self.params.candidates == Candidates::Fixed(0) {
            return bad("params.candidates: must be at least 1".into());
        }
        Ok(())
    }
}
