use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::{Duration, Instant};

use super::client::{Completion, CompletionClient, CompletionRequest, RequestFailure};
use super::fewshot::compose_fewshot;
use super::{PredictionRecord, RunConfig};
use crate::corpus::{format_instruction, Sample};
use crate::error::{Error, Result};

const RETRY_BACKOFF: Duration = Duration::from_millis(200);

/// Generates one prediction per sample, in input order.
///
/// `fewshot_pool` is consulted only when `config.few_shot_k > 0`. A server
/// error status becomes a failed record with empty output; a transport
/// failure that survives every retry aborts the run.
pub fn run_inference(
    samples: &[Sample],
    config: &RunConfig,
    client: &dyn CompletionClient,
    fewshot_pool: &[Sample],
) -> Result<Vec<PredictionRecord>> {
    if samples.is_empty() {
        return Err(Error::Empty("samples"));
    }
    let prompts: Vec<String> = samples
        .iter()
        .map(|s| {
            if config.few_shot_k == 0 {
                Ok(format_instruction(s))
            } else {
                compose_fewshot(s, fewshot_pool, config.few_shot_k, config.seed)
            }
        })
        .collect::<Result<_>>()?;

    let workers = config.max_concurrency.clamp(1, samples.len());
    let next = AtomicUsize::new(0);
    let abort = AtomicBool::new(false);
    let slots: Mutex<Vec<Option<PredictionRecord>>> = Mutex::new(vec![None; samples.len()]);
    let fatal: Mutex<Option<Error>> = Mutex::new(None);

    thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                if abort.load(Ordering::Relaxed) {
                    break;
                }
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= samples.len() {
                    break;
                }
                match predict_one(&samples[i], &prompts[i], config, client) {
                    Ok(rec) => slots.lock().expect("slots lock")[i] = Some(rec),
                    Err(e) => {
                        abort.store(true, Ordering::Relaxed);
                        fatal.lock().expect("error lock").get_or_insert(e);
                        break;
                    }
                }
            });
        }
    });

    if let Some(e) = fatal.into_inner().expect("error lock") {
        return Err(e);
    }
    Ok(slots
        .into_inner()
        .expect("slots lock")
        .into_iter()
        .map(|r| r.expect("every slot filled"))
        .collect())
}

fn predict_one(sample: &Sample, prompt: &str, config: &RunConfig, client: &dyn CompletionClient) -> Result<PredictionRecord> {
    let request = CompletionRequest {
        model: config.model_id.clone(),
        prompt: prompt.to_string(),
        max_tokens: config.max_tokens(sample.task),
        temperature: config.temperature,
        seed: config.seed,
    };
    let started = Instant::now();
    let outcome = send_with_retries(client, &request, config.retries);
    let wall_ms = started.elapsed().as_secs_f64() * 1000.0;

    let mut rec = PredictionRecord::from_raw(&sample.id, sample.task, &config.model_id, String::new());
    match outcome {
        Ok(c) => {
            let Completion { text, completion_tokens, prompt_tokens, server_ms } = c;
            rec.tokens_generated = completion_tokens.unwrap_or_else(|| whitespace_tokens(&text));
            rec.prompt_tokens = prompt_tokens.unwrap_or_else(|| whitespace_tokens(prompt));
            rec.latency_ms = server_ms.unwrap_or(wall_ms).max(0.0);
            rec.normalized_output = crate::metrics::strip_think(&text);
            rec.raw_output = text;
        }
        Err(RequestFailure::Transport(message)) => {
            return Err(Error::EndpointUnreachable { endpoint: client.endpoint().to_string(), message });
        }
        Err(failure) => {
            rec.latency_ms = wall_ms;
            rec.prompt_tokens = whitespace_tokens(prompt);
            rec.error = Some(failure.to_string());
        }
    }
    Ok(rec)
}

pub(crate) fn send_with_retries(
    client: &dyn CompletionClient,
    request: &CompletionRequest,
    retries: u32,
) -> std::result::Result<Completion, RequestFailure> {
    let mut attempt = 0;
    loop {
        match client.complete(request) {
            Err(f) if f.is_retryable() && attempt < retries => {
                attempt += 1;
                thread::sleep(RETRY_BACKOFF * attempt);
            }
            other => return other,
        }
    }
}

fn whitespace_tokens(text: &str) -> u64 {
    text.split_whitespace().count() as u64
}

#[cfg(test)]
mod tests {
    use std::sync::atomic::AtomicU32;

    use super::*;
    use crate::corpus::{QualityTier, TaskKind};

    struct Scripted {
        failures_before_success: u32,
        failure: RequestFailure,
        calls: AtomicU32,
    }

    impl CompletionClient for Scripted {
        fn endpoint(&self) -> &str {
            "stub://scripted"
        }

        fn complete(&self, request: &CompletionRequest) -> std::result::Result<Completion, RequestFailure> {
            let n = self.calls.fetch_add(1, Ordering::SeqCst);
            if n < self.failures_before_success {
                return Err(self.failure.clone());
            }
            Ok(Completion {
                text: format!("<think>\n\n</think>\n\n{} tokens", request.max_tokens),
                ..Completion::default()
            })
        }
    }

    fn sample(id: &str, task: TaskKind) -> Sample {
        Sample {
            id: id.into(),
            task,
            input: format!("input {id}"),
            target: "t".into(),
            source_dataset: "d".into(),
            modality: "CT".into(),
            rads_system: (task == TaskKind::RadsAssignment).then_some(crate::rads::RadsSystem::BiRads),
            tier: QualityTier::Gold,
        }
    }

    fn client(failures: u32, failure: RequestFailure) -> Scripted {
        Scripted { failures_before_success: failures, failure, calls: AtomicU32::new(0) }
    }

    #[test]
    fn order_budget_and_fallback_counts() {
        let samples = [sample("b", TaskKind::RadsAssignment), sample("a", TaskKind::Qa), sample("c", TaskKind::Nli)];
        let cfg = RunConfig { max_concurrency: 3, ..RunConfig::default() };
        let out = run_inference(&samples, &cfg, &client(0, RequestFailure::Malformed(String::new())), &[]).unwrap();
        let ids: Vec<&str> = out.iter().map(|r| r.sample_id.as_str()).collect();
        assert_eq!(ids, ["b", "a", "c"]);
        assert_eq!(out[0].normalized_output, "30 tokens");
        assert_eq!(out[1].normalized_output, "200 tokens");
        assert_eq!(out[0].tokens_generated, 4);
        assert!(out.iter().all(|r| r.error.is_none()));
    }

    #[test]
    fn transient_failures_are_retried() {
        let c = client(2, RequestFailure::Status { code: 503, body: "busy".into() });
        let cfg = RunConfig { retries: 2, ..RunConfig::default() };
        let out = run_inference(&[sample("x", TaskKind::Nli)], &cfg, &c, &[]).unwrap();
        assert!(out[0].error.is_none());
        assert_eq!(c.calls.load(Ordering::SeqCst), 3);
    }

    #[test]
    fn client_errors_become_failed_records() {
        let c = client(u32::MAX, RequestFailure::Status { code: 400, body: "bad".into() });
        let out = run_inference(&[sample("x", TaskKind::Nli)], &RunConfig::default(), &c, &[]).unwrap();
        assert_eq!(out[0].normalized_output, "");
        assert!(out[0].error.as_deref().unwrap().contains("400"));
        assert_eq!(c.calls.load(Ordering::SeqCst), 1);
    }

    #[test]
    fn exhausted_transport_is_fatal() {
        let c = client(u32::MAX, RequestFailure::Transport("refused".into()));
        let cfg = RunConfig { retries: 1, ..RunConfig::default() };
        let err = run_inference(&[sample("x", TaskKind::Nli)], &cfg, &c, &[]).unwrap_err();
        assert!(err.to_string().contains("stub://scripted"), "{err}");
    }

    #[test]
    fn empty_input() {
        let c = client(0, RequestFailure::Malformed(String::new()));
        assert!(run_inference(&[], &RunConfig::default(), &c, &[]).is_err());
    }
}
