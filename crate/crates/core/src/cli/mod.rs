//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage, 2 data, 3 endpoint.

mod commands;
mod config;

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use radlite::TaskKind;

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_ENDPOINT: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "radlite", version, about = "Radiology instruction corpus assembly and evaluation")]
#[command(args_override_self = true)]
pub struct Cli {
    /// Seed for every random choice in the run.
    #[arg(long, global = true, env = "RADLITE_SEED", default_value_t = 42)]
    pub seed: u64,
    /// TOML file supplying defaults for any flag.
    #[arg(long, global = true, env = "RADLITE_CONFIG")]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, env = "RADLITE_OUT", default_value = "out")]
    pub out: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ingest, deduplicate, split, cap and mix the instruction corpus.
    Assemble(AssembleArgs),
    /// Generate predictions for a test split against a completion server.
    Infer(InferArgs),
    /// Score prediction files.
    Eval(EvalArgs),
    /// Paired significance tests between two prediction files.
    Compare(CompareArgs),
    /// Clinical direction of RADS errors.
    Severity(SeverityArgs),
    /// Per-task best-of-two routing over eval reports.
    Route(RouteArgs),
    /// RADS zero-shot versus k-shot comparison.
    Fewshot(FewshotArgs),
    /// Throughput and latency against a completion server.
    Bench(BenchArgs),
}

fn task_value<T: std::str::FromStr>(raw: &str) -> Result<(TaskKind, T), String>
where
    T::Err: std::fmt::Display,
{
    let (task, value) = raw.split_once('=').ok_or_else(|| format!("expected TASK=VALUE, got `{raw}`"))?;
    let task: TaskKind = task.trim().parse()?;
    let value = value.trim().parse().map_err(|e| format!("`{value}`: {e}"))?;
    Ok((task, value))
}

fn task_usize(raw: &str) -> Result<(TaskKind, usize), String> {
    task_value(raw)
}

fn task_u32(raw: &str) -> Result<(TaskKind, u32), String> {
    task_value(raw)
}

fn task_f64(raw: &str) -> Result<(TaskKind, f64), String> {
    task_value(raw)
}

#[derive(Debug, Args, Serialize)]
pub struct AssembleArgs {
    /// Unified-format JSONL files or directories of them.
    #[arg(long = "in", required = true, num_args = 1..)]
    pub inputs: Vec<PathBuf>,
    #[arg(long, default_value = "unified")]
    pub schema: String,
    /// Training-sample cap applied to every task.
    #[arg(long, default_value_t = 30_000)]
    pub cap: usize,
    /// Per-task cap override, TASK=N.
    #[arg(long = "cap-task", value_parser = task_usize)]
    pub cap_task: Vec<(TaskKind, usize)>,
    /// Held-out samples per task (NLI at most 480).
    #[arg(long, default_value_t = 500)]
    pub test_size: usize,
    /// Mixture weight override, TASK=W.
    #[arg(long = "weight", value_parser = task_f64)]
    pub weights: Vec<(TaskKind, f64)>,
    /// Mixture draws; defaults to the training-set size.
    #[arg(long)]
    pub epoch_len: Option<usize>,
    /// Print planned counts without writing anything.
    #[arg(long)]
    pub dry_run: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct InferArgs {
    /// Test split (JSONL samples).
    #[arg(long)]
    pub test: PathBuf,
    #[arg(long, env = "RADLITE_ENDPOINT", default_value = "http://127.0.0.1:8080")]
    pub endpoint: String,
    #[arg(long, env = "RADLITE_MODEL_ID", default_value = "model")]
    pub model_id: String,
    /// Restrict to these tasks (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub tasks: Vec<TaskKind>,
    /// Few-shot exemplars per prompt.
    #[arg(long, default_value_t = 0)]
    pub k: usize,
    /// Exemplar pool (JSONL samples), required when k > 0.
    #[arg(long)]
    pub pool: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub concurrency: usize,
    #[arg(long, default_value_t = 3)]
    pub retries: u32,
    /// Generation budget override, TASK=N.
    #[arg(long = "max-tokens", value_parser = task_u32)]
    pub max_tokens: Vec<(TaskKind, u32)>,
    #[arg(long, default_value_t = 0.0)]
    pub temperature: f64,
    #[arg(long)]
    pub thinking: bool,
    /// Per-request timeout in seconds.
    #[arg(long, default_value_t = 300)]
    pub timeout: u64,
    /// Prediction file; defaults to <out>/<model-id>.jsonl.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Only the first N samples (after task filtering).
    #[arg(long)]
    pub limit: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct EvalArgs {
    #[arg(long)]
    pub test: PathBuf,
    /// Prediction files, one per model.
    #[arg(long = "pred", required = true, num_args = 1..)]
    pub preds: Vec<PathBuf>,
    #[arg(long, default_value_t = 10_000)]
    pub resamples: usize,
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
    /// Skip bootstrap intervals.
    #[arg(long)]
    pub no_ci: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct CompareArgs {
    #[arg(long)]
    pub test: PathBuf,
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct SeverityArgs {
    #[arg(long)]
    pub test: PathBuf,
    #[arg(long = "pred", required = true, num_args = 1..)]
    pub preds: Vec<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct RouteArgs {
    /// Eval CSV files.
    #[arg(long = "reports", required = true, num_args = 1..)]
    pub reports: Vec<PathBuf>,
    /// The two model ids to route between, A first.
    #[arg(long, value_delimiter = ',', num_args = 1..=2)]
    pub models: Vec<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct FewshotArgs {
    #[arg(long)]
    pub test: PathBuf,
    /// Zero-shot predictions.
    #[arg(long)]
    pub base: PathBuf,
    /// k-shot predictions.
    #[arg(long)]
    pub shots: PathBuf,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct BenchArgs {
    #[arg(long, env = "RADLITE_ENDPOINT", default_value = "http://127.0.0.1:8080")]
    pub endpoint: String,
    #[arg(long, env = "RADLITE_MODEL_ID", default_value = "model")]
    pub model_id: String,
    /// JSONL samples (rendered as prompts) or a text file with one prompt per line.
    #[arg(long)]
    pub prompts: PathBuf,
    #[arg(long)]
    pub limit: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub warmup: usize,
    #[arg(long, default_value_t = 30)]
    pub max_tokens: u32,
    #[arg(long)]
    pub threads: Option<u32>,
    #[arg(long)]
    pub quantization: Option<String>,
    #[arg(long, default_value_t = 3)]
    pub retries: u32,
    #[arg(long, default_value_t = 300)]
    pub timeout: u64,
}

pub fn run(raw: Vec<OsString>) -> ExitCode {
    let args = match config::expand_args(raw) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_endpoint() { EXIT_ENDPOINT } else { EXIT_DATA })
        }
    }
}
