use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tsstss::data::{load_csv, normalize_columns};
use tsstss_bench::{
    run_classify, run_experiment, summary_text, BenchError, Candidates, ExperimentConfig, Method,
    Params,
};

#[derive(Parser)]
#[command(
    name = "bench",
    version,
    about = "Benchmark harness for SRC, CRC, k-NN and TS-STSS"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a full experiment described by a TOML config.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Classify a test CSV against a training CSV with one method.
    Classify {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        test: PathBuf,
        #[arg(long)]
        method: Method,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        lambda: Option<f64>,
        /// A count or "half".
        #[arg(long)]
        candidates: Option<Candidates>,
        #[arg(long)]
        knn_k: Option<usize>,
        /// Accepted for interface symmetry with `run`; a fixed train/test
        /// pair involves no randomness.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// The CSVs start with a header row.
        #[arg(long)]
        header: bool,
        /// Skip unit-norm scaling of the samples.
        #[arg(long)]
        no_normalize: bool,
        #[arg(long)]
        out: PathBuf,
    },
}

fn classify(
    train: PathBuf,
    test: PathBuf,
    method: Method,
    params: Params,
    header: bool,
    normalize: bool,
    out: PathBuf,
) -> Result<String, BenchError> {
    params
        .solver()
        .validate()
        .map_err(|e| BenchError::Config(e.to_string()))?;
    if params.knn_k == 0 || params.candidates == Candidates::Fixed(0) {
        return Err(BenchError::Config(
            "--knn-k and --candidates must be at least 1".into(),
        ));
    }
    let mut train = load_csv(&train, header)?;
    let mut test = load_csv(&test, header)?;
    if normalize {
        train = normalize_columns(&train)?;
        test = normalize_columns(&test)?;
    }
    let report = run_classify(method, &train, &test, &params, &out)?;
    Ok(summary_text(&report))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let outcome = match cli.command {
        Command::Run { config } => ExperimentConfig::load(&config)
            .and_then(|cfg| run_experiment(&cfg))
            .map(|report| summary_text(&report)),
        Command::Classify {
            train,
            test,
            method,
            alpha,
            lambda,
            candidates,
            knn_k,
            seed: _,
            header,
            no_normalize,
            out,
        } => {
            let defaults = Params::default();
            let params = Params {
                alpha: alpha.unwrap_or(defaults.alpha),
                lambda: lambda.unwrap_or(defaults.lambda),
                candidates: candidates.unwrap_or(defaults.candidates),
                knn_k: knn_k.unwrap_or(defaults.knn_k),
                ..defaults
            };
            classify(train, test, method, params, header, !no_normalize, out)
        }
    };
    match outcome {
        Ok(summary) => {
            print!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
