use std::time::Instant;

use serde::Serialize;

use super::client::{CompletionClient, CompletionRequest, RequestFailure};
use super::runner::send_with_retries;
use super::RunConfig;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct BenchOptions {
    /// Leading requests excluded from the statistics.
    pub warmup: usize,
    pub max_tokens: u32,
    pub threads: Option<u32>,
    pub quantization: Option<String>,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions { warmup: 1, max_tokens: 30, threads: None, quantization: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub model_id: String,
    pub requests: usize,
    pub failed: usize,
    pub total_tokens: u64,
    pub mean_latency_s: f64,
    pub tokens_per_s: f64,
    pub model_size_bytes: Option<u64>,
    pub threads: Option<u32>,
    pub quantization: Option<String>,
}

/// Sequential throughput measurement over `prompts`, each sent once after
/// `options.warmup` untimed requests.
pub fn bench_throughput(
    client: &dyn CompletionClient,
    config: &RunConfig,
    prompts: &[String],
    options: &BenchOptions,
) -> Result<BenchReport> {
    if prompts.is_empty() {
        return Err(Error::Empty("benchmark prompts"));
    }
    if options.warmup == 0 {
        return Err(Error::InvalidInput("at least one warmup request is required".into()));
    }
    let request = |prompt: &String| CompletionRequest {
        model: config.model_id.clone(),
        prompt: prompt.clone(),
        max_tokens: options.max_tokens,
        temperature: config.temperature,
        seed: config.seed,
    };
    let unreachable = |message: String| Error::EndpointUnreachable { endpoint: client.endpoint().to_string(), message };

    for prompt in prompts.iter().cycle().take(options.warmup) {
        if let Err(RequestFailure::Transport(m)) = send_with_retries(client, &request(prompt), config.retries) {
            return Err(unreachable(m));
        }
    }

    let mut wall_s = 0.0;
    let mut tokens = 0u64;
    let mut completed = 0usize;
    let mut failed = 0usize;
    for prompt in prompts {
        let started = Instant::now();
        let outcome = send_with_retries(client, &request(prompt), config.retries);
        let elapsed = started.elapsed().as_secs_f64();
        match outcome {
            Ok(c) => {
                completed += 1;
                wall_s += elapsed;
                tokens += c.completion_tokens.unwrap_or_else(|| c.text.split_whitespace().count() as u64);
            }
            Err(RequestFailure::Transport(m)) => return Err(unreachable(m)),
            Err(_) => failed += 1,
        }
    }
    if completed == 0 || wall_s <= 0.0 {
        return Err(Error::Endpoint {
            endpoint: client.endpoint().to_string(),
            message: "no benchmark request completed".into(),
        });
    }
    let info = client.model_info();
    Ok(BenchReport {
        model_id: config.model_id.clone(),
        requests: completed,
        failed,
        total_tokens: tokens,
        mean_latency_s: wall_s / completed as f64,
        tokens_per_s: tokens as f64 / wall_s,
        model_size_bytes: info.and_then(|i| i.size_bytes),
        threads: options.threads,
        quantization: options.quantization.clone(),
    })
}

#[cfg(test)]
mod tests {
    use std::sync::atomic::{AtomicUsize, Ordering};
    use std::time::Duration;

    use super::*;
    use crate::harness::Completion;

    /// Emits `tokens` tokens, sleeping `per_token` for each.
    struct Paced {
        tokens: u64,
        per_token: Duration,
        fail_after: usize,
        calls: AtomicUsize,
    }

    impl CompletionClient for Paced {
        fn endpoint(&self) -> &str {
            "stub://paced"
        }

        fn complete(&self, _: &CompletionRequest) -> std::result::Result<Completion, RequestFailure> {
            if self.calls.fetch_add(1, Ordering::SeqCst) >= self.fail_after {
                return Err(RequestFailure::Status { code: 400, body: String::new() });
            }
            std::thread::sleep(self.per_token * self.tokens as u32);
            Ok(Completion { text: "x".into(), completion_tokens: Some(self.tokens), ..Completion::default() })
        }
    }

    fn paced(tokens: u64, fail_after: usize) -> Paced {
        Paced { tokens, per_token: Duration::from_millis(5), fail_after, calls: AtomicUsize::new(0) }
    }

    #[test]
    fn doubling_tokens_keeps_rate() {
        let prompts = vec!["p".to_string(); 3];
        let opts = BenchOptions::default();
        let short = bench_throughput(&paced(10, usize::MAX), &RunConfig::default(), &prompts, &opts).unwrap();
        let long = bench_throughput(&paced(20, usize::MAX), &RunConfig::default(), &prompts, &opts).unwrap();
        assert_eq!(short.requests, 3);
        assert!((short.tokens_per_s / long.tokens_per_s - 1.0).abs() < 0.15, "{short:?} {long:?}");
        assert!((long.mean_latency_s / short.mean_latency_s - 2.0).abs() < 0.3);
    }

    #[test]
    fn nothing_completed_is_an_error() {
        let prompts = vec!["p".to_string(); 2];
        let err = bench_throughput(&paced(1, 1), &RunConfig::default(), &prompts, &BenchOptions::default());
        assert!(err.is_err());
    }

    #[test]
    fn warmup_required() {
        let opts = BenchOptions { warmup: 0, ..BenchOptions::default() };
        assert!(bench_throughput(&paced(1, 9), &RunConfig::default(), &["p".into()], &opts).is_err());
    }
}
