use std::time::Duration;

use serde::Serialize;
use serde_json::Value;

/// Body of a `/v1/completions` request.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompletionRequest {
    pub model: String,
    pub prompt: String,
    pub max_tokens: u32,
    pub temperature: f64,
    pub seed: u64,
}

/// A successful generation. Token counts and timings are whatever the server reported.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Completion {
    pub text: String,
    pub completion_tokens: Option<u64>,
    pub prompt_tokens: Option<u64>,
    /// Server-side prompt plus generation time.
    pub server_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RequestFailure {
    /// No HTTP exchange took place (refused, reset, timed out).
    Transport(String),
    Status { code: u16, body: String },
    /// A 2xx response the client could not read.
    Malformed(String),
}

impl RequestFailure {
    pub fn is_retryable(&self) -> bool {
        match self {
            RequestFailure::Transport(_) => true,
            RequestFailure::Status { code, .. } => *code >= 500,
            RequestFailure::Malformed(_) => false,
        }
    }
}

impl std::fmt::Display for RequestFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RequestFailure::Transport(m) => write!(f, "transport error: {m}"),
            RequestFailure::Status { code, body } => write!(f, "HTTP {code}: {}", body.trim()),
            RequestFailure::Malformed(m) => write!(f, "malformed response: {m}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ModelInfo {
    pub id: Option<String>,
    pub size_bytes: Option<u64>,
}

pub trait CompletionClient: Sync {
    fn endpoint(&self) -> &str;

    fn complete(&self, request: &CompletionRequest) -> Result<Completion, RequestFailure>;

    fn model_info(&self) -> Option<ModelInfo> {
        None
    }
}

/// Blocking client for any server speaking the completion protocol.
pub struct HttpClient {
    endpoint: String,
    agent: ureq::Agent,
}

impl HttpClient {
    pub fn new(endpoint: &str, timeout: Duration) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .build()
            .into();
        HttpClient { endpoint: endpoint.trim_end_matches('/').to_string(), agent }
    }

    fn url(&self, path: &str) -> String {
        format!("{}{path}", self.endpoint)
    }
}

impl CompletionClient for HttpClient {
    fn endpoint(&self) -> &str {
        &self.endpoint
    }

    fn complete(&self, request: &CompletionRequest) -> Result<Completion, RequestFailure> {
        let body = serde_json::to_string(request).map_err(|e| RequestFailure::Malformed(e.to_string()))?;
        let mut resp = self
            .agent
            .post(&self.url("/v1/completions"))
            .header("Content-Type", "application/json")
            .send(body.as_str())
            .map_err(|e| RequestFailure::Transport(e.to_string()))?;
        let code = resp.status().as_u16();
        let text = resp
            .body_mut()
            .read_to_string()
            .map_err(|e| RequestFailure::Transport(e.to_string()))?;
        if !(200..300).contains(&code) {
            return Err(RequestFailure::Status { code, body: text });
        }
        parse_completion(&text)
    }

    fn model_info(&self) -> Option<ModelInfo> {
        let mut resp = self.agent.get(&self.url("/v1/models")).call().ok()?;
        if !resp.status().is_success() {
            return None;
        }
        let v: Value = serde_json::from_str(&resp.body_mut().read_to_string().ok()?).ok()?;
        let first = v.get("data")?.get(0)?;
        Some(ModelInfo {
            id: first.get("id").and_then(Value::as_str).map(str::to_string),
            size_bytes: first.pointer("/meta/size").and_then(Value::as_u64),
        })
    }
}

pub(crate) fn parse_completion(body: &str) -> Result<Completion, RequestFailure> {
    let v: Value = serde_json::from_str(body).map_err(|e| RequestFailure::Malformed(e.to_string()))?;
    let text = v
        .pointer("/choices/0/text")
        .and_then(Value::as_str)
        .ok_or_else(|| RequestFailure::Malformed("no choices[0].text".into()))?;
    let server_ms = match (
        v.pointer("/timings/prompt_ms").and_then(Value::as_f64),
        v.pointer("/timings/predicted_ms").and_then(Value::as_f64),
    ) {
        (Some(p), Some(g)) => Some(p + g),
        (None, Some(g)) => Some(g),
        _ => None,
    };
    Ok(Completion {
        text: text.to_string(),
        completion_tokens: v.pointer("/usage/completion_tokens").and_then(Value::as_u64),
        prompt_tokens: v.pointer("/usage/prompt_tokens").and_then(Value::as_u64),
        server_ms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_usage_and_timings() {
        let body = r#"{"choices":[{"text":" BI-RADS 4"}],
            "usage":{"completion_tokens":5,"prompt_tokens":40},
            "timings":{"prompt_ms":12.5,"predicted_ms":80.0}}"#;
        let c = parse_completion(body).unwrap();
        assert_eq!(c.text, " BI-RADS 4");
        assert_eq!((c.completion_tokens, c.prompt_tokens), (Some(5), Some(40)));
        assert_eq!(c.server_ms, Some(92.5));
    }

    #[test]
    fn minimal_and_malformed() {
        let c = parse_completion(r#"{"choices":[{"text":"x"}]}"#).unwrap();
        assert_eq!(c.completion_tokens, None);
        assert!(matches!(parse_completion("{}"), Err(RequestFailure::Malformed(_))));
        assert!(matches!(parse_completion("nope"), Err(RequestFailure::Malformed(_))));
    }

    #[test]
    fn retry_policy() {
        assert!(RequestFailure::Transport("x".into()).is_retryable());
        assert!(RequestFailure::Status { code: 503, body: String::new() }.is_retryable());
        assert!(!RequestFailure::Status { code: 400, body: String::new() }.is_retryable());
    }
}
