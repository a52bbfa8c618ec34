//! Config-driven benchmark harness: training-size sweeps over SRC, CRC,
//! k-NN and the two-stage classifier, with per-sample decision logs.

pub mod config;
pub mod error;
pub mod report;
pub mod runner;

pub use config::{Candidates, DatasetSource, ExperimentConfig, Method, Params, Preprocess, Split};
pub use error::{BenchError, Result};
pub use report::{emit_report, summary_text, MethodSummary, PointResult, SweepReport};
pub use runner::{
    accuracy, evaluate_method, run_classify, run_experiment, run_sweep, Record, StageDetail,
    TrainSize,
};
