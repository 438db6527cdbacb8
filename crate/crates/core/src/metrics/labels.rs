use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum NStage {
    N0,
    N1,
    N2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MStage {
    M0,
    M1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NliLabel {
    Entailment,
    Contradiction,
    Neutral,
}

impl NliLabel {
    pub const ALL: [NliLabel; 3] = [NliLabel::Entailment, NliLabel::Contradiction, NliLabel::Neutral];

    pub fn as_str(self) -> &'static str {
        match self {
            NliLabel::Entailment => "entailment",
            NliLabel::Contradiction => "contradiction",
            NliLabel::Neutral => "neutral",
        }
    }
}

/// Closed label vocabularies scored by exact match.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LabelSet {
    NStage,
    MStage,
    Nli,
}

impl LabelSet {
    /// Canonical spellings, in a fixed order.
    pub fn members(self) -> &'static [&'static str] {
        match self {
            LabelSet::NStage => &["N0", "N1", "N2"],
            LabelSet::MStage => &["M0", "M1"],
            LabelSet::Nli => &["entailment", "contradiction", "neutral"],
        }
    }

    fn pattern(self) -> &'static Regex {
        static N: OnceLock<Regex> = OnceLock::new();
        static M: OnceLock<Regex> = OnceLock::new();
        static NLI: OnceLock<Regex> = OnceLock::new();
        let cell = match self {
            LabelSet::NStage => &N,
            LabelSet::MStage => &M,
            LabelSet::Nli => &NLI,
        };
        cell.get_or_init(|| {
            let alts = self.members().join("|");
            Regex::new(&format!(r"(?i)\b(?:{alts})\b")).expect("label pattern compiles")
        })
    }
}

/// First whole-word, case-insensitive mention of a member of `set`.
pub fn parse_label(raw: &str, set: LabelSet) -> Option<&'static str> {
    let m = set.pattern().find(raw)?;
    set.members()
        .iter()
        .copied()
        .find(|member| member.eq_ignore_ascii_case(m.as_str()))
}

/// Share of predictions whose parsed label equals the ground-truth label.
/// Unparseable predictions count as wrong; ground truth must parse.
pub fn exact_accuracy<P: AsRef<str>, G: AsRef<str>>(preds: &[P], gts: &[G], set: LabelSet) -> Result<f64> {
    if preds.len() != gts.len() {
        return Err(Error::LengthMismatch { left: preds.len(), right: gts.len() });
    }
    if preds.is_empty() {
        return Err(Error::Empty("predictions"));
    }
    let mut hits = 0;
    for (p, g) in preds.iter().zip(gts) {
        let gt = parse_label(g.as_ref(), set)
            .ok_or_else(|| Error::InvalidInput(format!("ground truth `{}` is not a {set:?} label", g.as_ref())))?;
        if parse_label(p.as_ref(), set) == Some(gt) {
            hits += 1;
        }
    }
    Ok(hits as f64 / preds.len() as f64)
}
