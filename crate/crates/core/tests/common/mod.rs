//! Shared helpers: a minimal completion server on a loopback port and
//! fixture paths.
#![allow(dead_code)]

use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::path::PathBuf;
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::Duration;

use serde_json::{json, Value};

pub fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(rel)
}

/// Task name from the last `[TASK: ...]` tag in a prompt (the query block).
pub fn prompt_task(prompt: &str) -> &str {
    prompt
        .rsplit("[TASK: ")
        .next()
        .and_then(|rest| rest.split(']').next())
        .unwrap_or("")
}

/// Canned answer per task; enough for every metric to score something.
pub fn canned_reply(prompt: &str) -> String {
    match prompt_task(prompt) {
        "rads_assignment" => "BI-RADS 4".into(),
        "nli" => "neutral".into(),
        "n_staging" => "N0".into(),
        "m_staging" => "<think>\n\n</think>\n\nM0".into(),
        "temporal" => "pleural effusion: unchanged".into(),
        "abnormality" => "Edema: negative\nCardiomegaly: positive".into(),
        _ => "no acute cardiopulmonary process".into(),
    }
}

pub type Responder = dyn Fn(&Value) -> (u16, String) + Send + Sync;

pub struct StubServer {
    pub url: String,
    requests: Arc<Mutex<Vec<Value>>>,
}

impl StubServer {
    /// Answers every completion with `reply(prompt)`, `tokens` completion
    /// tokens and fixed server timings, after sleeping `delay`.
    pub fn canned(reply: fn(&str) -> String, tokens: u64, delay: Duration) -> Self {
        Self::start(Arc::new(move |req: &Value| {
            thread::sleep(delay);
            let prompt = req["prompt"].as_str().unwrap_or("");
            let body = json!({
                "choices": [{ "text": reply(prompt) }],
                "usage": { "completion_tokens": tokens, "prompt_tokens": prompt.split_whitespace().count() },
                "timings": { "prompt_ms": 4.0, "predicted_ms": 21.5 },
            });
            (200, body.to_string())
        }))
    }

    pub fn start(responder: Arc<Responder>) -> Self {
        let listener = TcpListener::bind("127.0.0.1:0").expect("bind loopback");
        let url = format!("http://{}", listener.local_addr().unwrap());
        let requests = Arc::new(Mutex::new(Vec::new()));
        let log = Arc::clone(&requests);
        thread::spawn(move || {
            for stream in listener.incoming().flatten() {
                let responder = Arc::clone(&responder);
                let log = Arc::clone(&log);
                thread::spawn(move || serve(stream, &*responder, &log));
            }
        });
        StubServer { url, requests }
    }

    /// Completion request bodies received so far.
    pub fn requests(&self) -> Vec<Value> {
        self.requests.lock().unwrap().clone()
    }
}

fn serve(stream: TcpStream, responder: &Responder, log: &Mutex<Vec<Value>>) {
    let mut reader = BufReader::new(stream.try_clone().expect("clone stream"));
    let mut request_line = String::new();
    if reader.read_line(&mut request_line).unwrap_or(0) == 0 {
        return;
    }
    let mut content_length = 0usize;
    loop {
        let mut line = String::new();
        if reader.read_line(&mut line).unwrap_or(0) == 0 || line == "\r\n" {
            break;
        }
        if let Some((k, v)) = line.split_once(':') {
            if k.eq_ignore_ascii_case("content-length") {
                content_length = v.trim().parse().unwrap_or(0);
            }
        }
    }
    let mut body = vec![0u8; content_length];
    if reader.read_exact(&mut body).is_err() {
        return;
    }
    let (status, payload) = if request_line.starts_with("GET /v1/models") {
        (200, json!({ "data": [{ "id": "stub-model", "meta": { "size": 1_800_000_000u64 } }] }).to_string())
    } else if request_line.starts_with("POST /v1/completions") {
        let req: Value = serde_json::from_slice(&body).unwrap_or(Value::Null);
        log.lock().unwrap().push(req.clone());
        responder(&req)
    } else {
        (404, "{}".into())
    };
    let mut stream = stream;
    let _ = write!(
        stream,
        "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{payload}",
        payload.len()
    );
    let _ = stream.flush();
}
