//! Output normalisation and per-task metrics.

mod abnormality;
mod labels;
mod rouge;
mod temporal;
mod think;

use std::sync::OnceLock;

use serde::Deserialize;

pub use abnormality::{
    parse_abnormality, per_label_accuracy, AbnormalityFinding, AbnormalityStatus, Condition,
};
pub use labels::{exact_accuracy, parse_label, LabelSet, MStage, NStage, NliLabel};
pub use rouge::{lcs_len, rouge_l_f1, tokenize, RougeScore};
pub use temporal::{parse_temporal, set_jaccard, TemporalItem, TemporalLabel, TemporalParse};
pub use think::strip_think;

const LABELS_TOML: &str = include_str!("../../data/labels.toml");

/// The shipped condition inventory and temporal label set.
#[derive(Debug, Deserialize)]
pub struct LabelData {
    pub version: u32,
    pub abnormality_conditions: Vec<String>,
    pub abnormality_statuses: Vec<String>,
    pub temporal_labels: Vec<String>,
}

impl LabelData {
    pub fn shipped() -> &'static LabelData {
        static DATA: OnceLock<LabelData> = OnceLock::new();
        DATA.get_or_init(|| toml::from_str(LABELS_TOML).expect("shipped labels.toml is valid"))
    }
}

/// Lowercase, trim and collapse internal whitespace.
pub(crate) fn normalize_phrase(s: &str) -> String {
    s.split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

/// Splits a structured output into `key: value` items, one per line or `;`.
/// Leading list markers are dropped.
pub(crate) fn structured_items(raw: &str) -> impl Iterator<Item = &str> {
    raw.split(['\n', ';'])
        .map(|item| item.trim().trim_start_matches(['-', '*', '•']).trim())
        .filter(|item| !item.is_empty())
}

/// Lowercased value with surrounding punctuation removed.
pub(crate) fn clean_value(s: &str) -> String {
    s.trim()
        .trim_matches(|c: char| !c.is_alphanumeric())
        .to_lowercase()
}
