use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{clean_value, normalize_phrase, structured_items};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TemporalLabel {
    New,
    Worsened,
    Improved,
    Resolved,
    Unchanged,
}

impl TemporalLabel {
    pub const ALL: [TemporalLabel; 5] = [
        TemporalLabel::New,
        TemporalLabel::Worsened,
        TemporalLabel::Improved,
        TemporalLabel::Resolved,
        TemporalLabel::Unchanged,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TemporalLabel::New => "new",
            TemporalLabel::Worsened => "worsened",
            TemporalLabel::Improved => "improved",
            TemporalLabel::Resolved => "resolved",
            TemporalLabel::Unchanged => "unchanged",
        }
    }
}

impl fmt::Display for TemporalLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TemporalLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = clean_value(s);
        TemporalLabel::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| format!("unknown temporal label `{s}`"))
    }
}

/// One `(finding, change)` pair; the finding phrase is lowercased and
/// whitespace-normalised.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TemporalItem {
    pub finding: String,
    pub label: TemporalLabel,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TemporalParse {
    pub items: BTreeSet<TemporalItem>,
    /// Items dropped because they had no `finding: label` shape or an unknown label.
    pub warnings: usize,
}

/// Reads `finding: label` items, one per line or separated by `;`.
pub fn parse_temporal(raw: &str) -> TemporalParse {
    let mut out = TemporalParse::default();
    for item in structured_items(raw) {
        let parsed = item.rsplit_once(':').and_then(|(finding, label)| {
            let finding = normalize_phrase(finding);
            let label = label.parse::<TemporalLabel>().ok()?;
            (!finding.is_empty()).then_some(TemporalItem { finding, label })
        });
        match parsed {
            Some(it) => {
                out.items.insert(it);
            }
            None => out.warnings += 1,
        }
    }
    out
}

/// |a ∩ b| / |a ∪ b|, with two empty sets counting as perfect agreement.
pub fn set_jaccard<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> f64 {
    let inter = a.intersection(b).count();
    let union = a.len() + b.len() - inter;
    if union == 0 {
        1.0
    } else {
        inter as f64 / union as f64
    }
}
