use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{clean_value, structured_items};
use crate::error::{Error, Result};

/// The 14 CheXbert observation labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Condition {
    EnlargedCardiomediastinum,
    Cardiomegaly,
    LungOpacity,
    LungLesion,
    Edema,
    Consolidation,
    Pneumonia,
    Atelectasis,
    Pneumothorax,
    PleuralEffusion,
    PleuralOther,
    Fracture,
    SupportDevices,
    NoFinding,
}

impl Condition {
    pub const ALL: [Condition; 14] = [
        Condition::EnlargedCardiomediastinum,
        Condition::Cardiomegaly,
        Condition::LungOpacity,
        Condition::LungLesion,
        Condition::Edema,
        Condition::Consolidation,
        Condition::Pneumonia,
        Condition::Atelectasis,
        Condition::Pneumothorax,
        Condition::PleuralEffusion,
        Condition::PleuralOther,
        Condition::Fracture,
        Condition::SupportDevices,
        Condition::NoFinding,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Condition::EnlargedCardiomediastinum => "Enlarged Cardiomediastinum",
            Condition::Cardiomegaly => "Cardiomegaly",
            Condition::LungOpacity => "Lung Opacity",
            Condition::LungLesion => "Lung Lesion",
            Condition::Edema => "Edema",
            Condition::Consolidation => "Consolidation",
            Condition::Pneumonia => "Pneumonia",
            Condition::Atelectasis => "Atelectasis",
            Condition::Pneumothorax => "Pneumothorax",
            Condition::PleuralEffusion => "Pleural Effusion",
            Condition::PleuralOther => "Pleural Other",
            Condition::Fracture => "Fracture",
            Condition::SupportDevices => "Support Devices",
            Condition::NoFinding => "No Finding",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn condition_key(s: &str) -> String {
    s.chars()
        .filter(|c| c.is_alphanumeric())
        .flat_map(char::to_lowercase)
        .collect()
}

impl FromStr for Condition {
    type Err = String;

    /// Case-insensitive; spaces, hyphens and underscores are ignored.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let key = condition_key(s);
        Condition::ALL
            .into_iter()
            .find(|c| condition_key(c.name()) == key)
            .ok_or_else(|| format!("unknown condition `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AbnormalityStatus {
    Positive,
    Negative,
    Uncertain,
}

impl FromStr for AbnormalityStatus {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match clean_value(s).as_str() {
            "positive" => Ok(AbnormalityStatus::Positive),
            "negative" => Ok(AbnormalityStatus::Negative),
            "uncertain" => Ok(AbnormalityStatus::Uncertain),
            other => Err(format!("unknown status `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AbnormalityFinding {
    pub condition: Condition,
    pub status: AbnormalityStatus,
}

/// Reads `condition: status` lines. Lines that do not fit the grammar are
/// skipped; for a repeated condition the first assignment wins.
pub fn parse_abnormality(raw: &str) -> Vec<AbnormalityFinding> {
    let mut out: Vec<AbnormalityFinding> = Vec::new();
    for item in structured_items(raw) {
        let Some((cond, status)) = item.rsplit_once(':') else { continue };
        let (Ok(condition), Ok(status)) = (cond.parse::<Condition>(), status.parse()) else {
            continue;
        };
        if out.iter().all(|f| f.condition != condition) {
            out.push(AbnormalityFinding { condition, status });
        }
    }
    out
}

/// Mean over ground-truth conditions of status agreement. A condition missing
/// from the prediction counts as wrong.
pub fn per_label_accuracy(pred: &str, gt: &[AbnormalityFinding]) -> Result<f64> {
    if gt.is_empty() {
        return Err(Error::Empty("ground-truth findings"));
    }
    let predicted: HashMap<Condition, AbnormalityStatus> = parse_abnormality(pred)
        .into_iter()
        .map(|f| (f.condition, f.status))
        .collect();
    let hits = gt
        .iter()
        .filter(|f| predicted.get(&f.condition) == Some(&f.status))
        .count();
    Ok(hits as f64 / gt.len() as f64)
}
