use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;
use serde_json::{Map, Value};

use super::{QualityTier, Sample, TaskKind};
use crate::error::{Error, Result};
use crate::rads::RadsSystem;

/// Declared layout of a dataset file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DatasetSchema {
    /// Flat objects with the `Sample` field names.
    #[default]
    Unified,
}

impl FromStr for DatasetSchema {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "unified" | "unified-v1" => Ok(DatasetSchema::Unified),
            other => Err(format!("unknown dataset schema `{other}`")),
        }
    }
}

/// A line that could not be turned into a [`Sample`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Rejection {
    pub path: PathBuf,
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Default)]
pub struct IngestOutcome {
    pub samples: Vec<Sample>,
    pub rejections: Vec<Rejection>,
}

/// Streams `path`, turning each non-blank line into a sample or a rejection.
/// Only an unreadable file is fatal.
pub fn ingest(path: &Path, schema: DatasetSchema) -> Result<IngestOutcome> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    ingest_reader(BufReader::new(file), path, schema)
}

pub fn ingest_reader<R: BufRead>(
    reader: R,
    path: &Path,
    schema: DatasetSchema,
) -> Result<IngestOutcome> {
    let mut outcome = IngestOutcome::default();
    let mut seen_ids = HashSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed = match schema {
            DatasetSchema::Unified => parse_unified(&line),
        };
        let reject = |reason: String| Rejection {
            path: path.to_path_buf(),
            line: line_no,
            reason,
        };
        match parsed {
            Ok(sample) => {
                if !seen_ids.insert(sample.id.clone()) {
                    outcome
                        .rejections
                        .push(reject(format!("duplicate id `{}`", sample.id)));
                } else {
                    outcome.samples.push(sample);
                }
            }
            Err(reason) => outcome.rejections.push(reject(reason)),
        }
    }
    Ok(outcome)
}

fn parse_unified(line: &str) -> Result<Sample, String> {
    let value: Value = serde_json::from_str(line).map_err(|e| format!("malformed record: {e}"))?;
    let obj = value
        .as_object()
        .ok_or_else(|| "record is not an object".to_string())?;
    if let Some((key, _)) = obj.iter().find(|(_, v)| v.is_object() || v.is_array()) {
        return Err(format!("field `{key}` is not a flat value"));
    }

    let task: TaskKind = required(obj, "task")?.parse()?;
    let tier: QualityTier = required(obj, "tier")?.parse()?;
    let rads_system = match obj.get("rads_system") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(s.parse::<RadsSystem>()?),
        Some(_) => return Err("field `rads_system` must be a string".into()),
    };
    let sample = Sample {
        id: required(obj, "id")?.to_string(),
        task,
        input: required(obj, "input")?.to_string(),
        target: required(obj, "target")?.to_string(),
        source_dataset: required(obj, "source_dataset")?.to_string(),
        modality: required(obj, "modality")?.to_string(),
        rads_system,
        tier,
    };
    sample.validate()?;
    Ok(sample)
}

fn required<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a str, String> {
    match obj.get(key) {
        None | Some(Value::Null) => Err(format!("missing required field `{key}`")),
        Some(Value::String(s)) => Ok(s),
        Some(_) => Err(format!("field `{key}` must be a string")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = r#"{"id":"s1","task":"nli","input":"premise / hypothesis","target":"neutral","source_dataset":"radnli","modality":"CXR","tier":"gold"}"#;

    fn run(text: &str) -> IngestOutcome {
        ingest_reader(text.as_bytes(), Path::new("mem.jsonl"), DatasetSchema::Unified).unwrap()
    }

    #[test]
    fn well_formed_lines_all_accepted() {
        let text = [GOOD, &GOOD.replace("s1", "s2"), &GOOD.replace("s1", "s3")].join("\n");
        let out = run(&text);
        assert_eq!(out.samples.len(), 3);
        assert!(out.rejections.is_empty());
    }

    #[test]
    fn missing_target_is_rejected_with_line_number() {
        let bad = r#"{"id":"s2","task":"nli","input":"x","source_dataset":"radnli","modality":"CXR","tier":"gold"}"#;
        let text = [GOOD, bad, &GOOD.replace("s1", "s3")].join("\n");
        let out = run(&text);
        assert_eq!(out.samples.len(), 2);
        assert_eq!(out.rejections.len(), 1);
        assert_eq!(out.rejections[0].line, 2);
        assert!(out.rejections[0].reason.contains("target"));
    }

    #[test]
    fn rads_sample_requires_system() {
        let bad = r#"{"id":"r1","task":"rads_assignment","input":"report","target":"BI-RADS 3","source_dataset":"multi-rads","modality":"MG","tier":"gold"}"#;
        let out = run(bad);
        assert!(out.samples.is_empty());
        assert!(out.rejections[0].reason.contains("rads_system"));

        let good = bad.replace(r#""tier""#, r#""rads_system":"BI-RADS","tier""#);
        let out = run(&good);
        assert_eq!(out.samples[0].rads_system, Some(RadsSystem::BiRads));
    }

    #[test]
    fn malformed_and_duplicate_lines() {
        let text = [GOOD, "{not json", GOOD, r#"{"id":"x","task":"nli","input":{"a":1}}"#].join("\n");
        let out = run(&text);
        assert_eq!(out.samples.len(), 1);
        let lines: Vec<_> = out.rejections.iter().map(|r| r.line).collect();
        assert_eq!(lines, vec![2, 3, 4]);
        assert!(out.rejections[1].reason.contains("duplicate"));
        assert!(out.rejections[2].reason.contains("flat"));
    }

    #[test]
    fn unreadable_file_is_an_error() {
        let err = ingest(Path::new("/nonexistent/data.jsonl"), DatasetSchema::Unified).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/data.jsonl"));
    }
}
