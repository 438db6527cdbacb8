use std::collections::BTreeMap;
use std::sync::OnceLock;

use regex::{Captures, Regex};

use super::{Inventory, ParseOutcome, RadsCategory, RadsSystem};
use crate::error::{Error, Result};

/// Candidate category mentions, leftmost first. Every branch captures a
/// whole alphanumeric code run so that trailing characters can never be
/// silently dropped ("CAD-RADS 4A" is not CAD-RADS 4).
const MENTION_PATTERN: &str = r"(?ix)
\b(?:
    (?P<sys>bi|pi|li|ti|cad|vi|lung|o|ni|gb) [\s_-]* rads
    (?: [\s:=_-]* (?:category|cat|score|class|level|us|mri) \b \.? )?
    [\s:=_-]*
    (?:
        lr [\s_-]* tr [\s:=_-]* (?P<sys_tr>[a-z]+(?:-[a-z]+)?)
      | (?P<code>(?:lr|tr)?[\s_-]*[a-z0-9]+)
    )
  | lr [\s_-]* tr [\s:=_-]* (?P<tr>[a-z]+(?:-[a-z]+)?)
  | (?P<lr>lr [\s_-]* [a-z0-9]+)
  | (?P<ti>tr [\s_-]* [0-9]+)
)";

/// A label parser bound to one category inventory.
#[derive(Debug, Clone)]
pub struct RadsGrammar {
    inventory: Inventory,
    mention: Regex,
}

impl RadsGrammar {
    pub fn new(inventory: Inventory) -> Self {
        RadsGrammar {
            inventory,
            mention: Regex::new(MENTION_PATTERN).expect("mention pattern compiles"),
        }
    }

    pub fn shipped() -> &'static RadsGrammar {
        static GRAMMAR: OnceLock<RadsGrammar> = OnceLock::new();
        GRAMMAR.get_or_init(|| RadsGrammar::new(Inventory::shipped().clone()))
    }

    pub fn inventory(&self) -> &Inventory {
        &self.inventory
    }

    /// First category mention in `raw` that resolves against the inventory.
    /// Mentions of any system are accepted; the caller decides what a
    /// system mismatch means.
    pub fn parse(&self, raw: &str) -> ParseOutcome {
        self.mention
            .captures_iter(raw)
            .find_map(|caps| self.resolve(&caps))
            .map_or_else(|| ParseOutcome::Invalid(raw.to_string()), ParseOutcome::Valid)
    }

    fn resolve(&self, caps: &Captures<'_>) -> Option<RadsCategory> {
        let (system, code) = if let Some(sys) = caps.name("sys") {
            match caps.name("sys_tr") {
                Some(word) => (RadsSystem::LrTr, word.as_str()),
                None => (prefix_system(sys.as_str())?, caps.name("code")?.as_str()),
            }
        } else if let Some(word) = caps.name("tr") {
            (RadsSystem::LrTr, word.as_str())
        } else if let Some(code) = caps.name("lr") {
            (RadsSystem::LiRads, code.as_str())
        } else {
            (RadsSystem::TiRads, caps.name("ti")?.as_str())
        };
        self.inventory.category(system, code)
    }
}

fn prefix_system(prefix: &str) -> Option<RadsSystem> {
    Some(match prefix.to_ascii_lowercase().as_str() {
        "bi" => RadsSystem::BiRads,
        "pi" => RadsSystem::PiRads,
        "li" => RadsSystem::LiRads,
        "ti" => RadsSystem::TiRads,
        "cad" => RadsSystem::CadRads,
        "vi" => RadsSystem::ViRads,
        "lung" => RadsSystem::LungRads,
        "o" => RadsSystem::ORads,
        "ni" => RadsSystem::NiRads,
        "gb" => RadsSystem::GbRads,
        _ => return None,
    })
}

/// Parses with the shipped grammar.
pub fn parse(raw: &str) -> ParseOutcome {
    RadsGrammar::shipped().parse(raw)
}

/// Fraction of outputs that contain a well-formed category of any system.
pub fn validity<S: AsRef<str>>(outputs: &[S]) -> Result<f64> {
    if outputs.is_empty() {
        return Err(Error::Empty("outputs"));
    }
    let valid = outputs.iter().filter(|o| parse(o.as_ref()).is_valid()).count();
    Ok(valid as f64 / outputs.len() as f64)
}

fn check_lengths(preds: usize, gts: usize) -> Result<()> {
    if preds != gts {
        return Err(Error::LengthMismatch { left: preds, right: gts });
    }
    if preds == 0 {
        return Err(Error::Empty("predictions"));
    }
    Ok(())
}

/// Share of predictions whose canonical category equals the ground truth.
pub fn accuracy<S: AsRef<str>>(preds: &[S], gts: &[RadsCategory]) -> Result<f64> {
    check_lengths(preds.len(), gts.len())?;
    let hits = preds
        .iter()
        .zip(gts)
        .filter(|(p, gt)| parse(p.as_ref()).category().is_some_and(|c| c.same_category(gt)))
        .count();
    Ok(hits as f64 / preds.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SystemAccuracy {
    pub n: usize,
    pub correct: usize,
}

impl SystemAccuracy {
    pub fn accuracy(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.correct as f64 / self.n as f64
        }
    }
}

/// Accuracy broken down by the ground truth's reporting family (LR-TR counts under LI-RADS).
pub fn per_system_accuracy<S: AsRef<str>>(
    preds: &[S],
    gts: &[RadsCategory],
) -> Result<BTreeMap<RadsSystem, SystemAccuracy>> {
    check_lengths(preds.len(), gts.len())?;
    let mut out: BTreeMap<RadsSystem, SystemAccuracy> = BTreeMap::new();
    for (p, gt) in preds.iter().zip(gts) {
        let slot = out.entry(gt.system.family()).or_default();
        slot.n += 1;
        if parse(p.as_ref()).category().is_some_and(|c| c.same_category(gt)) {
            slot.correct += 1;
        }
    }
    Ok(out)
}
