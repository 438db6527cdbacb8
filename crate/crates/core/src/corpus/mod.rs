//! Unified instruction corpus: record types, ingestion, selection and mixtures.

mod ingest;
mod mixture;
mod prompt;
mod select;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::rads::RadsSystem;

pub use ingest::{ingest, ingest_reader, DatasetSchema, IngestOutcome, Rejection};
pub use mixture::{expected_fractions, weighted_mixture, MixtureRecord, MixtureWeights};
pub use prompt::{format_instruction, PromptTable};
pub use select::{cap_task, dedupe, split, SplitSpec, NLI_TEST_SIZE};

/// The nine radiology tasks. String names double as the `[TASK: ...]` tags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    RadsAssignment,
    Impression,
    Temporal,
    Ner,
    NStaging,
    MStaging,
    Abnormality,
    Qa,
    Nli,
}

impl TaskKind {
    pub const ALL: [TaskKind; 9] = [
        TaskKind::RadsAssignment,
        TaskKind::Impression,
        TaskKind::Temporal,
        TaskKind::Ner,
        TaskKind::NStaging,
        TaskKind::MStaging,
        TaskKind::Abnormality,
        TaskKind::Qa,
        TaskKind::Nli,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TaskKind::RadsAssignment => "rads_assignment",
            TaskKind::Impression => "impression",
            TaskKind::Temporal => "temporal",
            TaskKind::Ner => "ner",
            TaskKind::NStaging => "n_staging",
            TaskKind::MStaging => "m_staging",
            TaskKind::Abnormality => "abnormality",
            TaskKind::Qa => "qa",
            TaskKind::Nli => "nli",
        }
    }

    /// Human-readable row label used in report tables.
    pub fn display_name(self) -> &'static str {
        match self {
            TaskKind::RadsAssignment => "RADS Assignment",
            TaskKind::Impression => "Impression Gen.",
            TaskKind::Temporal => "Temporal Comp.",
            TaskKind::Ner => "Radiology NER",
            TaskKind::NStaging => "N-staging",
            TaskKind::MStaging => "M-staging",
            TaskKind::Abnormality => "Abnormality Det.",
            TaskKind::Qa => "Radiology QA",
            TaskKind::Nli => "Radiology NLI",
        }
    }

    pub(crate) fn index(self) -> u64 {
        TaskKind::ALL.iter().position(|t| *t == self).unwrap_or(0) as u64
    }
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TaskKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TaskKind::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| format!("unknown task `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QualityTier {
    /// Expert-annotated.
    Gold,
    /// Model-predicted or algorithmically generated.
    Silver,
    /// LLM-assigned labels.
    Bronze,
}

impl FromStr for QualityTier {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gold" => Ok(QualityTier::Gold),
            "silver" => Ok(QualityTier::Silver),
            "bronze" => Ok(QualityTier::Bronze),
            other => Err(format!("unknown tier `{other}`")),
        }
    }
}

/// One instruction-tuning instance in the unified format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sample {
    pub id: String,
    pub task: TaskKind,
    pub input: String,
    pub target: String,
    pub source_dataset: String,
    pub modality: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rads_system: Option<RadsSystem>,
    pub tier: QualityTier,
}

impl Sample {
    /// Checks the record-level invariants that serde cannot express.
    pub fn validate(&self) -> Result<(), String> {
        if self.id.is_empty() {
            return Err("`id` is empty".into());
        }
        if self.input.trim().is_empty() {
            return Err("`input` is empty".into());
        }
        if self.target.trim().is_empty() {
            return Err("`target` is empty".into());
        }
        match (self.task, self.rads_system) {
            (TaskKind::RadsAssignment, None) => {
                Err("rads_assignment sample requires `rads_system`".into())
            }
            (task, Some(_)) if task != TaskKind::RadsAssignment => {
                Err(format!("`rads_system` is only allowed on rads_assignment, not {task}"))
            }
            _ => Ok(()),
        }
    }
}
