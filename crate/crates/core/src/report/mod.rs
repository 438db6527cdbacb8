//! Run manifests and table emission.
//!
//! Every table is written twice: a CSV at full precision and a markdown
//! rendering at three decimals. Both embed the deterministic part of the
//! run manifest; wall-clock timestamps go only to a JSON sidecar so that
//! reruns on identical inputs reproduce the tables byte for byte.

mod analysis;
mod tables;

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub use analysis::{
    fewshot_summary, nli_confusion, rads_pairs, severity_summary, system_accuracy, FewshotSummary, SettingScores,
    SeveritySummary, SystemDelta,
};
pub use tables::{
    bench_table, compare_table, counts_table, eval_table, fewshot_table, nli_confusion_table, rads_system_table,
    route_table, severity_table, CountsRow, EvalEntry,
};

/// One CSV cell. Reals keep full precision in CSV.
#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Text(String),
    Real(f64),
    Int(u64),
    Empty,
}

impl Field {
    fn csv(&self) -> String {
        match self {
            Field::Text(s) => s.clone(),
            Field::Real(v) => v.to_string(),
            Field::Int(v) => v.to_string(),
            Field::Empty => String::new(),
        }
    }
}

impl From<&str> for Field {
    fn from(s: &str) -> Self {
        Field::Text(s.to_string())
    }
}

impl From<String> for Field {
    fn from(s: String) -> Self {
        Field::Text(s)
    }
}

impl From<f64> for Field {
    fn from(v: f64) -> Self {
        Field::Real(v)
    }
}

impl From<usize> for Field {
    fn from(v: usize) -> Self {
        Field::Int(v as u64)
    }
}

impl<T: Into<Field>> From<Option<T>> for Field {
    fn from(v: Option<T>) -> Self {
        v.map_or(Field::Empty, Into::into)
    }
}

/// A rendered table: machine-readable rows plus the human layout.
#[derive(Debug, Clone, PartialEq)]
pub struct Rendered {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Field>>,
    pub markdown: String,
}

impl Rendered {
    pub fn to_csv(&self, manifest: &RunManifest) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Field::csv))?;
        }
        let body = w.into_inner().map_err(|e| Error::InvalidInput(e.to_string()))?;
        Ok(format!("# manifest: {}\n{}", manifest.stamp(), String::from_utf8_lossy(&body)))
    }

    pub fn to_markdown(&self, manifest: &RunManifest) -> String {
        format!("{}\n<!-- manifest: {} -->\n", self.markdown.trim_end(), manifest.stamp())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: u64,
    pub config: serde_json::Value,
    pub inputs: Vec<InputDigest>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub started_at: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub finished_at: Option<String>,
}

impl RunManifest {
    pub fn new(command: &str, seed: u64, config: serde_json::Value) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            seed,
            config,
            inputs: Vec::new(),
            started_at: Some(now()),
            finished_at: None,
        }
    }

    /// Records the content hash of an input file.
    pub fn add_input(&mut self, path: &Path) -> Result<()> {
        self.inputs.push(InputDigest { path: path.display().to_string(), sha256: digest_file(path)? });
        Ok(())
    }

    /// Compact JSON of the fields that do not vary between identical runs.
    pub fn stamp(&self) -> String {
        let stable = RunManifest { started_at: None, finished_at: None, ..self.clone() };
        serde_json::to_string(&stable).expect("manifest serializes")
    }

    pub fn finish(&mut self) {
        self.finished_at = Some(now());
    }

    pub fn write_sidecar(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        write_file(path, &(text + "\n"))
    }
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

pub fn digest_file(path: &Path) -> Result<String> {
    let mut file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 64 * 1024];
    loop {
        let n = file.read(&mut buf).map_err(|e| Error::io(path, e))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex::encode(hasher.finalize()))
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Writes `<dir>/<stem>.csv` and `<dir>/<stem>.md`; returns both paths.
pub fn emit(dir: &Path, stem: &str, table: &Rendered, manifest: &RunManifest) -> Result<[PathBuf; 2]> {
    let csv_path = dir.join(format!("{stem}.csv"));
    let md_path = dir.join(format!("{stem}.md"));
    write_file(&csv_path, &table.to_csv(manifest)?)?;
    write_file(&md_path, &table.to_markdown(manifest))?;
    Ok([csv_path, md_path])
}

/// Reader that skips the `#` manifest line.
pub fn csv_reader(path: &Path) -> Result<csv::Reader<fs::File>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(file))
}

pub(crate) fn markdown_table(headers: &[&str], align: &[Align], rows: &[Vec<String>]) -> String {
    let mut out = format!("| {} |\n|", headers.join(" | "));
    for a in align {
        out.push_str(match a {
            Align::Left => " --- |",
            Align::Right => " ---: |",
            Align::Center => " :---: |",
        });
    }
    out.push('\n');
    for row in rows {
        out.push_str(&format!("| {} |\n", row.join(" | ")));
    }
    out
}

#[derive(Debug, Clone, Copy)]
pub(crate) enum Align {
    Left,
    Right,
    Center,
}

pub(crate) fn fixed3(v: f64) -> String {
    format!("{v:.3}")
}
