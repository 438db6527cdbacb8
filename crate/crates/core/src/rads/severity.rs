use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use super::{parse, ParseOutcome, RadsCategory};

/// Clinical direction of a RADS prediction relative to the ground truth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ErrorDirection {
    Exact,
    /// Predicted less severe than the ground truth.
    Undercall,
    /// Predicted more severe than the ground truth.
    Overcall,
    /// Same severity rank, different code.
    SafeMisclassify,
    /// Different system, an unordered code, or no parse: no direction exists.
    CrossSystemUndefined,
}

impl ErrorDirection {
    pub const ALL: [ErrorDirection; 5] = [
        ErrorDirection::Exact,
        ErrorDirection::Undercall,
        ErrorDirection::Overcall,
        ErrorDirection::SafeMisclassify,
        ErrorDirection::CrossSystemUndefined,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorDirection::Exact => "exact",
            ErrorDirection::Undercall => "undercall",
            ErrorDirection::Overcall => "overcall",
            ErrorDirection::SafeMisclassify => "safe_misclassify",
            ErrorDirection::CrossSystemUndefined => "cross_system_undefined",
        }
    }
}

impl fmt::Display for ErrorDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn classify_error(pred: &ParseOutcome, gt: &RadsCategory) -> ErrorDirection {
    let Some(pred) = pred.category() else {
        return ErrorDirection::CrossSystemUndefined;
    };
    if pred.same_category(gt) {
        return ErrorDirection::Exact;
    }
    if pred.system != gt.system {
        return ErrorDirection::CrossSystemUndefined;
    }
    match (pred.rank.ordered(), gt.rank.ordered()) {
        (Some(p), Some(g)) if p < g => ErrorDirection::Undercall,
        (Some(p), Some(g)) if p > g => ErrorDirection::Overcall,
        (Some(_), Some(_)) => ErrorDirection::SafeMisclassify,
        _ => ErrorDirection::CrossSystemUndefined,
    }
}

/// Undercall/overcall/safe shares among the errors that have a direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DirectionRatios {
    pub undercall: f64,
    pub overcall: f64,
    pub safe: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeverityReport {
    pub n: usize,
    pub counts: BTreeMap<ErrorDirection, usize>,
}

impl SeverityReport {
    pub fn count(&self, direction: ErrorDirection) -> usize {
        self.counts.get(&direction).copied().unwrap_or(0)
    }

    /// Errors with a defined direction: undercall + overcall + safe.
    pub fn directed_errors(&self) -> usize {
        self.count(ErrorDirection::Undercall)
            + self.count(ErrorDirection::Overcall)
            + self.count(ErrorDirection::SafeMisclassify)
    }

    /// Shares among directed errors; `None` when there are none.
    pub fn ratios(&self) -> Option<DirectionRatios> {
        let denom = self.directed_errors();
        (denom > 0).then(|| DirectionRatios {
            undercall: self.count(ErrorDirection::Undercall) as f64 / denom as f64,
            overcall: self.count(ErrorDirection::Overcall) as f64 / denom as f64,
            safe: self.count(ErrorDirection::SafeMisclassify) as f64 / denom as f64,
        })
    }

    /// Share of `direction` among the predictions whose direction is defined
    /// (everything except cross-system/undefined cases).
    pub fn share_of_classified(&self, direction: ErrorDirection) -> Option<f64> {
        let denom = self.n - self.count(ErrorDirection::CrossSystemUndefined);
        (denom > 0 && direction != ErrorDirection::CrossSystemUndefined)
            .then(|| self.count(direction) as f64 / denom as f64)
    }
}

pub fn severity_report<S: AsRef<str>>(pairs: &[(S, RadsCategory)]) -> SeverityReport {
    let mut counts: BTreeMap<ErrorDirection, usize> =
        ErrorDirection::ALL.into_iter().map(|d| (d, 0)).collect();
    for (pred, gt) in pairs {
        *counts.entry(classify_error(&parse(pred.as_ref()), gt)).or_default() += 1;
    }
    SeverityReport {
        n: pairs.len(),
        counts,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdjacencyProfile {
    /// |rank difference| -> count, over same-system errors where both codes are ranked.
    pub histogram: BTreeMap<u32, usize>,
}

impl AdjacencyProfile {
    pub fn total(&self) -> usize {
        self.histogram.values().sum()
    }

    pub fn fraction_at(&self, distance: u32) -> Option<f64> {
        let total = self.total();
        (total > 0).then(|| self.histogram.get(&distance).copied().unwrap_or(0) as f64 / total as f64)
    }

    pub fn adjacent_fraction(&self) -> Option<f64> {
        self.fraction_at(1)
    }

    /// Share of errors two or more ranks away.
    pub fn distant_fraction(&self) -> Option<f64> {
        let total = self.total();
        (total > 0).then(|| {
            self.histogram.range(2..).map(|(_, c)| c).sum::<usize>() as f64 / total as f64
        })
    }
}

pub fn adjacency_profile<S: AsRef<str>>(pairs: &[(S, RadsCategory)]) -> AdjacencyProfile {
    let mut histogram = BTreeMap::new();
    for (pred, gt) in pairs {
        let ParseOutcome::Valid(p) = parse(pred.as_ref()) else { continue };
        if p.system != gt.system || p.same_category(gt) {
            continue;
        }
        if let (Some(a), Some(b)) = (p.rank.ordered(), gt.rank.ordered()) {
            *histogram.entry(a.abs_diff(b)).or_insert(0) += 1;
        }
    }
    AdjacencyProfile { histogram }
}
