//! Radiology multi-task instruction corpus tooling and evaluation harness.
//!
//! The crate is organised around the evaluation pipeline:
//!
//! - [`corpus`]: ingestion of unified instruction records, deduplication,
//!   capping, deterministic train/test splitting and task-weighted mixtures.
//! - [`rads`]: the RADS label grammar, category inventory and clinical
//!   severity classification of errors.
//! - [`metrics`]: output normalisation and the per-task metrics
//!   (ROUGE-L, set-Jaccard, per-label accuracy, exact label accuracy).
//! - [`stats`]: paired significance tests, bootstrap intervals and
//!   confusion matrices.
//! - [`harness`]: the completion client, inference runner, few-shot
//!   composition, task dispatch, oracle routing, model comparison and
//!   throughput benchmarking.
//! - [`report`]: run manifests and CSV/markdown table emission.

pub mod corpus;
pub mod error;
pub mod harness;
pub mod jsonl;
pub mod metrics;
pub mod rads;
pub mod report;
pub mod stats;

pub use corpus::{Sample, TaskKind};
pub use error::{Error, Result};
