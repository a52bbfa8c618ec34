use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::config::Method;
use crate::error::{BenchError, Result};
use crate::runner::{Record, TrainSize};

/// Accuracy of one method at one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointResult {
    pub method: Method,
    pub train_per_class: TrainSize,
    pub accuracy: f64,
    pub n_test: usize,
    /// Samples whose solve failed; they are already counted wrong.
    pub n_failed: usize,
    pub seconds: f64,
}

/// MAX and AVG accuracy of one method across the sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MethodSummary {
    pub method: Method,
    pub max: f64,
    pub avg: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    points: Vec<PointResult>,
    summaries: Vec<MethodSummary>,
}

impl SweepReport {
    /// Points are sorted by (method name, sweep point).
    pub fn new(mut points: Vec<PointResult>) -> Self {
        points.sort_by(|a, b| {
            (a.method.as_str(), a.train_per_class).cmp(&(b.method.as_str(), b.train_per_class))
        });
        let mut summaries: Vec<MethodSummary> = Vec::new();
        for chunk in points.chunk_by(|a, b| a.method == b.method) {
            let accs = chunk.iter().map(|p| p.accuracy);
            summaries.push(MethodSummary {
                method: chunk[0].method,
                max: accs.clone().fold(f64::NEG_INFINITY, f64::max),
                avg: accs.sum::<f64>() / chunk.len() as f64,
            });
        }
        Self { points, summaries }
    }

    pub fn points(&self) -> &[PointResult] {
        &self.points
    }

    pub fn summaries(&self) -> &[MethodSummary] {
        &self.summaries
    }

    pub fn point(&self, method: Method, size: TrainSize) -> Option<&PointResult> {
        self.points
            .iter()
            .find(|p| p.method == method && p.train_per_class == size)
    }

    pub fn summary(&self, method: Method) -> Option<&MethodSummary> {
        self.summaries.iter().find(|s| s.method == method)
    }
}

fn output_err(path: &Path) -> impl FnOnce(io::Error) -> BenchError + '_ {
    move |source| BenchError::Output {
        path: path.to_path_buf(),
        source,
    }
}

/// results.csv: one row per sweep point, then `MAX` and `AVG` rows per
/// method. `seconds` is left blank unless `timing` is set.
fn write_results(report: &SweepReport, path: &Path, timing: bool) -> Result<()> {
    let to_err = |e: csv::Error| BenchError::Output {
        path: path.to_path_buf(),
        source: e.into(),
    };
    let mut w = csv::Writer::from_path(path).map_err(to_err)?;
    w.write_record(["method", "train_per_class", "accuracy", "n_test", "seconds"])
        .map_err(to_err)?;
    for p in report.points() {
        let seconds = if timing {
            format!("{:.3}", p.seconds)
        } else {
            String::new()
        };
        w.write_record([
            p.method.as_str(),
            &p.train_per_class.to_string(),
            &p.accuracy.to_string(),
            &p.n_test.to_string(),
            &seconds,
        ])
        .map_err(to_err)?;
    }
    for s in report.summaries() {
        for (tag, value) in [("MAX", s.max), ("AVG", s.avg)] {
            w.write_record([s.method.as_str(), tag, &value.to_string(), "", ""])
                .map_err(to_err)?;
        }
    }
    w.flush().map_err(output_err(path))
}

fn write_decisions(records: &[Record], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(output_err(path))?;
    let mut w = BufWriter::new(file);
    for r in records {
        serde_json::to_writer(&mut w, r).map_err(|e| BenchError::Output {
            path: path.to_path_buf(),
            source: e.into(),
        })?;
        w.write_all(b"\n").map_err(output_err(path))?;
    }
    w.flush().map_err(output_err(path))
}

/// Human-readable table of accuracies, failures and timings.
pub fn summary_text(report: &SweepReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<8} {:>8} {:>9} {:>7} {:>7} {:>9}",
        "method", "train", "accuracy", "n_test", "failed", "seconds"
    );
    for p in report.points() {
        let _ = writeln!(
            out,
            "{:<8} {:>8} {:>9.4} {:>7} {:>7} {:>9.3}",
            p.method.as_str(),
            p.train_per_class.to_string(),
            p.accuracy,
            p.n_test,
            p.n_failed,
            p.seconds
        );
    }
    out.push('\n');
    let _ = writeln!(out, "{:<8} {:>9} {:>9}", "method", "MAX", "AVG");
    for s in report.summaries() {
        let _ = writeln!(
            out,
            "{:<8} {:>9.4} {:>9.4}",
            s.method.as_str(),
            s.max,
            s.avg
        );
    }
    out
}

/// Writes results.csv, decisions.jsonl and summary.txt into `out_dir`,
/// creating it if needed.
pub fn emit_report(
    report: &SweepReport,
    records: &[Record],
    out_dir: &Path,
    timing: bool,
) -> Result<()> {
    fs::create_dir_all(out_dir).map_err(output_err(out_dir))?;
    write_results(report, &out_dir.join("results.csv"), timing)?;
    write_decisions(records, &out_dir.join("decisions.jsonl"))?;
    let summary = out_dir.join("summary.txt");
    fs::write(&summary, summary_text(report)).map_err(output_err(&summary))
}
