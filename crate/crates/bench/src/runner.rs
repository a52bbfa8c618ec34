use std::fmt;
use std::sync::OnceLock;
use std::thread;
use std::time::Instant;

use serde::{Serialize, Serializer};
use tsstss::data::{
    downsample_images, generate_synthetic, holdout_split, load_csv, load_idx, normalize_columns,
    subsample_per_class, SplitSpec,
};
use tsstss::{
    classify_crc_with, classify_knn, classify_src, ridge_projector, ClassId, Dataset64,
    LabeledVerdict, Pipeline,
};

use crate::config::{DatasetSource, ExperimentConfig, Method, Params};
use crate::error::{BenchError, Result};
use crate::report::{PointResult, SweepReport};

/// Training samples per class at one sweep point; `All` for a predivided
/// dataset used without a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TrainSize {
    PerClass(usize),
    All,
}

impl fmt::Display for TrainSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrainSize::PerClass(n) => write!(f, "{n}"),
            TrainSize::All => f.write_str("all"),
        }
    }
}

impl Serialize for TrainSize {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            TrainSize::PerClass(n) => s.serialize_u64(*n as u64),
            TrainSize::All => s.serialize_str("all"),
        }
    }
}

/// Two-stage details attached to a tsstss record.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageDetail {
    pub teacher: u32,
    pub student: u32,
    pub gate: f64,
    pub student_score: f64,
    pub provenance: &'static str,
    pub candidates: Vec<u32>,
}

/// One line of decisions.jsonl.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub method: Method,
    pub train_per_class: TrainSize,
    /// Index of the sample within its test set.
    pub sample: usize,
    pub truth: u32,
    pub predicted: Option<u32>,
    pub correct: bool,
    #[serde(flatten, skip_serializing_if = "Option::is_none")]
    pub stages: Option<StageDetail>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Record {
    fn new(method: Method, size: TrainSize, sample: usize, truth: ClassId) -> Self {
        Self {
            method,
            train_per_class: size,
            sample,
            truth: truth.0,
            predicted: None,
            correct: false,
            stages: None,
            error: None,
        }
    }

    fn predicted(mut self, label: ClassId) -> Self {
        self.predicted = Some(label.0);
        self.correct = label.0 == self.truth;
        self
    }

    fn failed(mut self, err: impl fmt::Display) -> Self {
        self.error = Some(err.to_string());
        self
    }
}

/// Accuracy over `records`, which must be non-empty.
pub fn accuracy(records: &[Record]) -> f64 {
    records.iter().filter(|r| r.correct).count() as f64 / records.len() as f64
}

/// Maps `f` over `0..n` on all available cores; results come back in index
/// order whatever the scheduling.
fn par_map<R: Send>(n: usize, f: impl Fn(usize) -> R + Sync) -> Vec<R> {
    let workers = thread::available_parallelism()
        .map_or(1, |w| w.get())
        .min(n);
    if workers <= 1 {
        return (0..n).map(f).collect();
    }
    let f = &f;
    let mut tagged: Vec<(usize, R)> = thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                s.spawn(move || {
                    (w..n)
                        .step_by(workers)
                        .map(|i| (i, f(i)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker panicked"))
            .collect()
    });
    tagged.sort_unstable_by_key(|(i, _)| *i);
    tagged.into_iter().map(|(_, r)| r).collect()
}

fn check_compatible(train: &Dataset64, test: &Dataset64) -> tsstss::Result<()> {
    if train.dim() != test.dim() {
        return Err(tsstss::Error::InvalidInput(format!(
            "training samples have {} features, test samples {}",
            train.dim(),
            test.dim()
        )));
    }
    if let Some(c) = test
        .class_ids()
        .into_iter()
        .find(|c| train.class_group(*c).is_none())
    {
        return Err(tsstss::Error::InvalidInput(format!(
            "test class {c} has no training samples"
        )));
    }
    Ok(())
}

/// Per-sample SRC verdicts (or error messages) and the seconds they took.
type SrcRun = (Vec<Result<LabeledVerdict<f64>, String>>, f64);

/// One (train, test) pair, evaluated for any number of methods. SRC verdicts
/// are computed once and shared between `src` and the tsstss teacher.
struct Evaluator<'a> {
    train: &'a Dataset64,
    test: &'a Dataset64,
    params: &'a Params,
    size: TrainSize,
    src: OnceLock<SrcRun>,
}

impl<'a> Evaluator<'a> {
    fn new(train: &'a Dataset64, test: &'a Dataset64, params: &'a Params, size: TrainSize) -> Self {
        Self {
            train,
            test,
            params,
            size,
            src: OnceLock::new(),
        }
    }

    fn record(&self, method: Method, j: usize) -> Record {
        Record::new(method, self.size, j, self.test.labels()[j])
    }

    fn src_verdicts(&self) -> &SrcRun {
        self.src.get_or_init(|| {
            let start = Instant::now();
            let solver = self.params.solver();
            let verdicts = par_map(self.test.len(), |j| {
                classify_src(self.train, self.test.sample(j), &solver).map_err(|e| e.to_string())
            });
            (verdicts, start.elapsed().as_secs_f64())
        })
    }

    /// Records for every test sample and the wall time spent on them.
    fn run(&self, method: Method) -> Result<(Vec<Record>, f64)> {
        if matches!(method, Method::Src | Method::Tsstss) {
            // Timed on its own; both methods are charged for it below.
            self.src_verdicts();
        }
        let start = Instant::now();
        let n = self.test.len();
        let (records, extra) = match method {
            Method::Src => {
                let (verdicts, secs) = self.src_verdicts();
                let records = verdicts
                    .iter()
                    .enumerate()
                    .map(|(j, v)| match v {
                        Ok(v) => self.record(method, j).predicted(v.label),
                        Err(e) => self.record(method, j).failed(e),
                    })
                    .collect();
                (records, *secs)
            }
            Method::Crc => {
                let projector = ridge_projector(self.train.features(), self.params.lambda)?;
                let records = par_map(n, |j| {
                    match classify_crc_with(self.train, &projector, self.test.sample(j)) {
                        Ok(v) => self.record(method, j).predicted(v.label),
                        Err(e) => self.record(method, j).failed(e),
                    }
                });
                (records, 0.0)
            }
            Method::Knn => {
                let k = self.params.knn_k;
                if k > self.train.len() {
                    return Err(BenchError::Config(format!(
                        "params.knn_k = {k} exceeds the {} training samples",
                        self.train.len()
                    )));
                }
                let records = par_map(n, |j| {
                    match classify_knn(self.train, self.test.sample(j), k) {
                        Ok(label) => self.record(method, j).predicted(label),
                        Err(e) => self.record(method, j).failed(e),
                    }
                });
                (records, 0.0)
            }
            Method::Tsstss => {
                let pipeline = Pipeline::new(self.train.clone(), self.params.pipeline())?;
                let (verdicts, secs) = self.src_verdicts();
                let records = par_map(n, |j| {
                    let y = self.test.sample(j);
                    let decision = verdicts[j]
                        .clone()
                        .map_err(|e| format!("teacher: {e}"))
                        .and_then(|src| {
                            let teacher = pipeline
                                .teacher_from(y, src)
                                .map_err(|e| format!("teacher: {e}"))?;
                            let student = pipeline
                                .student(&teacher.candidates, y)
                                .map_err(|e| format!("student: {e}"))?;
                            Ok(tsstss::decide(teacher, student))
                        });
                    match decision {
                        Ok(d) => {
                            let mut r = self.record(method, j).predicted(d.label);
                            r.stages = Some(StageDetail {
                                teacher: d.teacher.label.0,
                                student: d.student.label.0,
                                gate: d.teacher.gate,
                                student_score: d.student.top_score,
                                provenance: d.provenance.as_str(),
                                candidates: d.teacher.candidates.iter().map(|c| c.0).collect(),
                            });
                            r
                        }
                        Err(e) => self.record(method, j).failed(e),
                    }
                });
                (records, *secs)
            }
        };
        Ok((records, start.elapsed().as_secs_f64() + extra))
    }
}

/// Runs one method over `test` with a model built from `train`.
/// Returns the accuracy and one record per test sample; per-sample solver
/// failures count as wrong and carry an error message.
pub fn evaluate_method(
    method: Method,
    train: &Dataset64,
    test: &Dataset64,
    params: &Params,
) -> Result<(f64, Vec<Record>)> {
    check_compatible(train, test)?;
    let eval = Evaluator::new(train, test, params, TrainSize::All);
    let (records, _) = eval.run(method)?;
    Ok((accuracy(&records), records))
}

/// Loads the configured source: the whole pool, or (train, test) when the
/// source is predivided.
fn load(cfg: &ExperimentConfig) -> Result<(Dataset64, Option<Dataset64>)> {
    Ok(match &cfg.dataset {
        DatasetSource::Csv {
            path,
            test_path,
            header,
        } => {
            let main = load_csv(path, *header)?;
            let test = test_path
                .as_deref()
                .map(|p| load_csv(p, *header))
                .transpose()?;
            (main, test)
        }
        DatasetSource::Idx {
            images,
            labels,
            test_images,
            test_labels,
        } => {
            let main = load_idx(images, labels)?;
            let test = match (test_images, test_labels) {
                (Some(i), Some(l)) => Some(load_idx(i, l)?),
                _ => None,
            };
            (main, test)
        }
        DatasetSource::Synthetic { .. } => {
            let spec = cfg.dataset.synthetic_spec().expect("synthetic source");
            let (train, test) = generate_synthetic(&spec)?;
            (train, Some(test))
        }
    })
}

fn preprocess(cfg: &ExperimentConfig, data: Dataset64) -> Result<Dataset64> {
    let p = &cfg.preprocess;
    let mut data = match p.max_per_class {
        Some(n) => subsample_per_class(&data, n, cfg.split.seed)?,
        None => data,
    };
    if let Some(factor) = p.downsample.filter(|&f| f > 1) {
        let (h, w) = match (p.image_height, p.image_width) {
            (Some(h), Some(w)) => (h, w),
            (Some(h), None) => (h, data.dim() / h),
            (None, Some(w)) => (data.dim() / w, w),
            (None, None) => {
                let side = (data.dim() as f64).sqrt().round() as usize;
                if side * side != data.dim() {
                    return Err(BenchError::Config(format!(
                        "preprocess: {} features is not a square image; set image_height and image_width",
                        data.dim()
                    )));
                }
                (side, side)
            }
        };
        data = downsample_images(&data, h, w, factor)
            .map_err(|e| BenchError::Config(format!("preprocess.downsample: {e}")))?;
    }
    if p.normalize {
        data = normalize_columns(&data)?;
    }
    Ok(data)
}

/// The (size, train, test) triples of the sweep.
fn sweep_points(
    cfg: &ExperimentConfig,
    main: Dataset64,
    test: Option<Dataset64>,
) -> Result<Vec<(TrainSize, Dataset64, Dataset64)>> {
    let seed = cfg.split.seed;
    match (test, &cfg.split.sweep) {
        (Some(test), None) => Ok(vec![(TrainSize::All, main, test)]),
        (Some(test), Some(sweep)) => sweep
            .iter()
            .map(|&n| {
                if let Some(c) = main.classes().iter().find(|c| c.columns.len() < n) {
                    return Err(BenchError::Config(format!(
                        "split.sweep: {n} training samples per class, but class {} has only {}",
                        c.id,
                        c.columns.len()
                    )));
                }
                let train = subsample_per_class(&main, n, seed)?;
                Ok((TrainSize::PerClass(n), train, test.clone()))
            })
            .collect(),
        (None, Some(sweep)) => sweep
            .iter()
            .map(|&n| {
                let spec = SplitSpec {
                    train_per_class: n,
                    seed,
                };
                let (train, test) = holdout_split(&main, spec)
                    .map_err(|e| BenchError::Config(format!("split.sweep: {e}")))?;
                Ok((TrainSize::PerClass(n), train, test))
            })
            .collect(),
        (None, None) => Err(BenchError::Config(
            "split.sweep: required when the dataset has no separate test set".into(),
        )),
    }
}

/// Runs the whole sweep without writing anything. Records are sorted by
/// (method name, sweep point, sample index).
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<(SweepReport, Vec<Record>)> {
    cfg.validate()?;
    let (main, test) = load(cfg)?;
    let main = preprocess(cfg, main)?;
    let test = test.map(|t| preprocess(cfg, t)).transpose()?;

    let mut methods = cfg.methods.clone();
    methods.sort_by_key(|m| m.as_str());

    let mut points = Vec::new();
    let mut records = Vec::new();
    for (size, train, test) in sweep_points(cfg, main, test)? {
        check_compatible(&train, &test).map_err(|e| BenchError::Data(e.to_string()))?;
        let eval = Evaluator::new(&train, &test, &cfg.params, size);
        for &method in &methods {
            let (recs, seconds) = eval.run(method)?;
            points.push(PointResult {
                method,
                train_per_class: size,
                accuracy: accuracy(&recs),
                n_test: recs.len(),
                n_failed: recs.iter().filter(|r| r.error.is_some()).count(),
                seconds,
            });
            records.extend(recs);
        }
    }
    records.sort_by(|a, b| {
        (a.method.as_str(), a.train_per_class, a.sample).cmp(&(
            b.method.as_str(),
            b.train_per_class,
            b.sample,
        ))
    });
    Ok((SweepReport::new(points), records))
}

/// Runs the sweep and writes results.csv, decisions.jsonl and summary.txt
/// into the configured output directory.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<SweepReport> {
    let (report, records) = run_sweep(cfg)?;
    crate::report::emit_report(&report, &records, &cfg.output, cfg.report.timing)?;
    Ok(report)
}

/// The `classify` subcommand: one method on a fixed (train, test) pair,
/// written out like a one-point sweep.
pub fn run_classify(
    method: Method,
    train: &Dataset64,
    test: &Dataset64,
    params: &Params,
    out_dir: &std::path::Path,
) -> Result<SweepReport> {
    check_compatible(train, test).map_err(|e| BenchError::Data(e.to_string()))?;
    let eval = Evaluator::new(train, test, params, TrainSize::All);
    let (records, seconds) = eval.run(method)?;
    let report = SweepReport::new(vec![PointResult {
        method,
        train_per_class: TrainSize::All,
        accuracy: accuracy(&records),
        n_test: records.len(),
        n_failed: records.iter().filter(|r| r.error.is_some()).count(),
        seconds,
    }]);
    crate::report::emit_report(&report, &records, out_dir, false)?;
    Ok(report)
}
