//! RADS label grammar: category inventory, free-text parsing, accuracy and
//! the clinical severity direction of classification errors.

mod inventory;
mod parse;
mod severity;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use inventory::{Inventory, InventoryEntry};
pub use parse::{accuracy, parse, per_system_accuracy, validity, RadsGrammar, SystemAccuracy};
pub use severity::{
    adjacency_profile, classify_error, severity_report, AdjacencyProfile, DirectionRatios,
    ErrorDirection, SeverityReport,
};

/// The reporting systems covered by the inventory. LR-TR (LI-RADS treatment
/// response) is kept separate from LI-RADS because its codes form their own scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum RadsSystem {
    BiRads,
    PiRads,
    LiRads,
    LrTr,
    TiRads,
    CadRads,
    ViRads,
    LungRads,
    ORads,
    NiRads,
    GbRads,
}

impl RadsSystem {
    pub const ALL: [RadsSystem; 11] = [
        RadsSystem::BiRads,
        RadsSystem::PiRads,
        RadsSystem::LiRads,
        RadsSystem::LrTr,
        RadsSystem::TiRads,
        RadsSystem::CadRads,
        RadsSystem::ViRads,
        RadsSystem::LungRads,
        RadsSystem::ORads,
        RadsSystem::NiRads,
        RadsSystem::GbRads,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RadsSystem::BiRads => "BI-RADS",
            RadsSystem::PiRads => "PI-RADS",
            RadsSystem::LiRads => "LI-RADS",
            RadsSystem::LrTr => "LR-TR",
            RadsSystem::TiRads => "TI-RADS",
            RadsSystem::CadRads => "CAD-RADS",
            RadsSystem::ViRads => "VI-RADS",
            RadsSystem::LungRads => "Lung-RADS",
            RadsSystem::ORads => "O-RADS",
            RadsSystem::NiRads => "NI-RADS",
            RadsSystem::GbRads => "GB-RADS",
        }
    }

    /// Reporting family: LR-TR folds into LI-RADS, everything else is its own family.
    pub fn family(self) -> RadsSystem {
        match self {
            RadsSystem::LrTr => RadsSystem::LiRads,
            other => other,
        }
    }
}

impl fmt::Display for RadsSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

fn squash(s: &str) -> String {
    s.chars()
        .filter(|c| !matches!(c, '-' | '_' | ' ' | '\t'))
        .flat_map(char::to_lowercase)
        .collect()
}

impl FromStr for RadsSystem {
    type Err = String;

    /// Accepts canonical names and their spacing/hyphenation variants ("BIRADS", "bi rads").
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = squash(s);
        RadsSystem::ALL
            .into_iter()
            .find(|sys| squash(sys.as_str()) == key)
            .ok_or_else(|| format!("unknown RADS system `{s}`"))
    }
}

impl TryFrom<String> for RadsSystem {
    type Error = String;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

impl From<RadsSystem> for String {
    fn from(value: RadsSystem) -> Self {
        value.as_str().to_string()
    }
}

/// Position on a system's clinical severity scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RankRepr", into = "RankRepr")]
pub enum SeverityRank {
    Ordered(u32),
    /// Codes with no place on the severity scale (e.g. incomplete assessments, LR-M).
    Unordered,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RankRepr {
    Ordered(u32),
    Word(String),
}

impl TryFrom<RankRepr> for SeverityRank {
    type Error = String;

    fn try_from(value: RankRepr) -> Result<Self, Self::Error> {
        match value {
            RankRepr::Ordered(r) => Ok(SeverityRank::Ordered(r)),
            RankRepr::Word(w) if w == "unordered" => Ok(SeverityRank::Unordered),
            RankRepr::Word(w) => Err(format!("rank must be an integer or \"unordered\", got `{w}`")),
        }
    }
}

impl From<SeverityRank> for RankRepr {
    fn from(value: SeverityRank) -> Self {
        match value {
            SeverityRank::Ordered(r) => RankRepr::Ordered(r),
            SeverityRank::Unordered => RankRepr::Word("unordered".into()),
        }
    }
}

impl SeverityRank {
    pub fn ordered(self) -> Option<u32> {
        match self {
            SeverityRank::Ordered(r) => Some(r),
            SeverityRank::Unordered => None,
        }
    }
}

/// A canonical category from the inventory.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RadsCategory {
    pub system: RadsSystem,
    pub code: String,
    pub rank: SeverityRank,
}

impl RadsCategory {
    /// Canonical surface form, e.g. `BI-RADS 4A`, `LI-RADS LR-M`, `LR-TR Viable`.
    pub fn canonical(&self) -> String {
        match self.system {
            RadsSystem::LrTr => format!("LR-TR {}", self.code),
            sys => format!("{} {}", sys, self.code),
        }
    }

    /// Same system and code; rank is derived from those two.
    pub fn same_category(&self, other: &RadsCategory) -> bool {
        self.system == other.system && self.code == other.code
    }
}

impl fmt::Display for RadsCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}

/// Result of reading a model output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseOutcome {
    Valid(RadsCategory),
    Invalid(String),
}

impl ParseOutcome {
    pub fn category(&self) -> Option<&RadsCategory> {
        match self {
            ParseOutcome::Valid(c) => Some(c),
            ParseOutcome::Invalid(_) => None,
        }
    }

    pub fn is_valid(&self) -> bool {
        matches!(self, ParseOutcome::Valid(_))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn system_names_accept_spacing_variants() {
        for s in ["BI-RADS", "BIRADS", "bi rads", "Bi_Rads"] {
            assert_eq!(s.parse::<RadsSystem>().unwrap(), RadsSystem::BiRads);
        }
        assert_eq!("lung-rads".parse::<RadsSystem>().unwrap(), RadsSystem::LungRads);
        assert_eq!("LR-TR".parse::<RadsSystem>().unwrap(), RadsSystem::LrTr);
        assert!("X-RADS".parse::<RadsSystem>().is_err());
        assert_eq!(serde_json::to_string(&RadsSystem::ORads).unwrap(), "\"O-RADS\"");
    }

    #[test]
    fn rank_serialisation() {
        let r: SeverityRank = serde_json::from_str("\"unordered\"").unwrap();
        assert_eq!(r, SeverityRank::Unordered);
        let r: SeverityRank = serde_json::from_str("4").unwrap();
        assert_eq!(r.ordered(), Some(4));
    }
}
