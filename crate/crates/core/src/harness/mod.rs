//! Inference, evaluation and model comparison.

mod bench;
mod client;
mod compare;
mod evaluate;
mod fewshot;
mod route;
mod runner;

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::TaskKind;
use crate::error::Result;
use crate::jsonl;

pub use bench::{bench_throughput, BenchOptions, BenchReport};
pub use client::{Completion, CompletionClient, CompletionRequest, HttpClient, ModelInfo, RequestFailure};
pub use compare::{compare, test_family, ComparisonReport, ComparisonRow, TestFamily};
pub use evaluate::{evaluate, index_ground_truth, GroundTruth, MetricName, TaskReport};
pub use fewshot::compose_fewshot;
pub use route::{oracle_route, ModelReports, RouteRow, RouteTable};
pub use runner::run_inference;

/// One model output for one test sample. Field names are the on-disk format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub sample_id: String,
    pub task: TaskKind,
    pub model_id: String,
    pub raw_output: String,
    pub normalized_output: String,
    pub latency_ms: f64,
    pub tokens_generated: u64,
    pub prompt_tokens: u64,
    /// Set when the server answered with an error status; the output is then empty.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl PredictionRecord {
    /// Builds a record from raw text, deriving the normalized output.
    pub fn from_raw(sample_id: &str, task: TaskKind, model_id: &str, raw_output: String) -> Self {
        PredictionRecord {
            sample_id: sample_id.to_string(),
            task,
            model_id: model_id.to_string(),
            normalized_output: crate::metrics::strip_think(&raw_output),
            raw_output,
            latency_ms: 0.0,
            tokens_generated: 0,
            prompt_tokens: 0,
            error: None,
        }
    }
}

pub fn read_predictions(path: &Path) -> Result<Vec<PredictionRecord>> {
    jsonl::read_records(path)
}

/// Writes records sorted by sample id so that file bytes do not depend on completion order.
pub fn write_predictions(path: &Path, records: &[PredictionRecord]) -> Result<()> {
    let mut sorted: Vec<&PredictionRecord> = records.iter().collect();
    sorted.sort_by(|a, b| a.sample_id.cmp(&b.sample_id));
    jsonl::write_records(path, sorted)
}

/// Default generation budget per task.
pub fn default_max_tokens(task: TaskKind) -> u32 {
    match task {
        TaskKind::RadsAssignment => 30,
        TaskKind::Nli | TaskKind::NStaging | TaskKind::MStaging => 10,
        TaskKind::Temporal | TaskKind::Ner | TaskKind::Abnormality => 256,
        TaskKind::Impression | TaskKind::Qa => 200,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub endpoint: String,
    pub model_id: String,
    pub per_task_max_tokens: BTreeMap<TaskKind, u32>,
    pub temperature: f64,
    pub few_shot_k: usize,
    pub thinking_enabled: bool,
    pub seed: u64,
    pub max_concurrency: usize,
    /// Extra attempts after a transport failure or 5xx response.
    pub retries: u32,
    pub timeout_s: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            endpoint: "http://127.0.0.1:8080".into(),
            model_id: "model".into(),
            per_task_max_tokens: TaskKind::ALL.into_iter().map(|t| (t, default_max_tokens(t))).collect(),
            temperature: 0.0,
            few_shot_k: 0,
            thinking_enabled: false,
            seed: 42,
            max_concurrency: 1,
            retries: 3,
            timeout_s: 300,
        }
    }
}

impl RunConfig {
    pub fn max_tokens(&self, task: TaskKind) -> u32 {
        self.per_task_max_tokens.get(&task).copied().unwrap_or_else(|| default_max_tokens(task))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_field_names() {
        let rec = PredictionRecord::from_raw("s1", TaskKind::Nli, "m", "<think>x</think> neutral".into());
        let v = serde_json::to_value(&rec).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        assert_eq!(
            keys,
            [
                "latency_ms",
                "model_id",
                "normalized_output",
                "prompt_tokens",
                "raw_output",
                "sample_id",
                "task",
                "tokens_generated"
            ]
        );
        assert_eq!(rec.normalized_output, "neutral");
    }

    #[test]
    fn budgets() {
        let cfg = RunConfig::default();
        assert_eq!(cfg.max_tokens(TaskKind::RadsAssignment), 30);
        assert_eq!(cfg.max_tokens(TaskKind::NStaging), 10);
        assert_eq!(cfg.temperature, 0.0);
        assert!(!cfg.thinking_enabled);
        let partial: RunConfig = toml::from_str("[per_task_max_tokens]\nqa = 64\n").unwrap();
        assert_eq!(partial.max_tokens(TaskKind::Qa), 64);
        assert_eq!(partial.max_tokens(TaskKind::RadsAssignment), 30);
    }
}
