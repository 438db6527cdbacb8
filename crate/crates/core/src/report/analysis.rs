use std::collections::BTreeMap;

use serde::Serialize;

use crate::corpus::TaskKind;
use crate::error::{Error, Result};
use crate::harness::{GroundTruth, PredictionRecord};
use crate::metrics::{parse_label, LabelSet, NliLabel};
use crate::rads::{
    self, adjacency_profile, per_system_accuracy, severity_report, AdjacencyProfile, RadsCategory, RadsSystem,
    SeverityReport, SystemAccuracy,
};
use crate::stats::{confusion_matrix, ConfusionMatrix};

fn model_id(preds: &[PredictionRecord]) -> String {
    preds.first().map(|p| p.model_id.clone()).unwrap_or_default()
}

/// (normalized output, ground-truth category) for every RADS prediction, by sample id.
pub fn rads_pairs(preds: &[PredictionRecord], gts: &GroundTruth) -> Result<Vec<(String, RadsCategory)>> {
    let mut rows: Vec<(&str, String, RadsCategory)> = Vec::new();
    for p in preds.iter().filter(|p| p.task == TaskKind::RadsAssignment) {
        let gt = gts.get(&p.sample_id).ok_or_else(|| Error::MissingGroundTruth(p.sample_id.clone()))?;
        let cat = rads::parse(&gt.target)
            .category()
            .cloned()
            .ok_or_else(|| Error::InvalidInput(format!("sample {}: target is not a valid RADS category", gt.id)))?;
        rows.push((&p.sample_id, p.normalized_output.clone(), cat));
    }
    if rows.is_empty() {
        return Err(Error::Empty("RADS predictions"));
    }
    rows.sort_by(|a, b| a.0.cmp(b.0));
    Ok(rows.into_iter().map(|(_, out, cat)| (out, cat)).collect())
}

pub fn system_accuracy(preds: &[PredictionRecord], gts: &GroundTruth) -> Result<BTreeMap<RadsSystem, SystemAccuracy>> {
    let (outs, cats): (Vec<String>, Vec<RadsCategory>) = rads_pairs(preds, gts)?.into_iter().unzip();
    per_system_accuracy(&outs, &cats)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeveritySummary {
    pub model_id: String,
    pub report: SeverityReport,
    pub adjacency: AdjacencyProfile,
}

pub fn severity_summary(preds: &[PredictionRecord], gts: &GroundTruth) -> Result<SeveritySummary> {
    let pairs = rads_pairs(preds, gts)?;
    Ok(SeveritySummary {
        model_id: model_id(preds),
        report: severity_report(&pairs),
        adjacency: adjacency_profile(&pairs),
    })
}

/// NLI confusion over entailment / contradiction / neutral plus unparsed outputs.
pub fn nli_confusion(preds: &[PredictionRecord], gts: &GroundTruth) -> Result<ConfusionMatrix> {
    let mut pairs: Vec<(&str, Option<&'static str>, &'static str)> = Vec::new();
    for p in preds.iter().filter(|p| p.task == TaskKind::Nli) {
        let gt = gts.get(&p.sample_id).ok_or_else(|| Error::MissingGroundTruth(p.sample_id.clone()))?;
        let truth = parse_label(&gt.target, LabelSet::Nli)
            .ok_or_else(|| Error::InvalidInput(format!("sample {}: target is not an NLI label", gt.id)))?;
        pairs.push((&p.sample_id, parse_label(&p.normalized_output, LabelSet::Nli), truth));
    }
    if pairs.is_empty() {
        return Err(Error::Empty("NLI predictions"));
    }
    pairs.sort_by(|a, b| a.0.cmp(b.0));
    let predicted: Vec<Option<&str>> = pairs.iter().map(|p| p.1).collect();
    let truths: Vec<&str> = pairs.iter().map(|p| p.2).collect();
    let labels: Vec<&str> = NliLabel::ALL.iter().map(|l| l.as_str()).collect();
    confusion_matrix(&predicted, &truths, &labels)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SettingScores {
    pub model_id: String,
    pub n: usize,
    pub validity: f64,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemDelta {
    pub system: RadsSystem,
    pub n: usize,
    pub base: f64,
    pub shots: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FewshotSummary {
    pub k: usize,
    pub base: SettingScores,
    pub shots: SettingScores,
    pub systems: Vec<SystemDelta>,
}

impl FewshotSummary {
    pub fn accuracy_delta(&self) -> f64 {
        self.shots.accuracy - self.base.accuracy
    }
}

fn setting(preds: &[PredictionRecord], pairs: &[(String, RadsCategory)]) -> Result<SettingScores> {
    let (outs, cats): (Vec<&String>, Vec<RadsCategory>) = pairs.iter().map(|(o, c)| (o, c.clone())).unzip();
    Ok(SettingScores {
        model_id: model_id(preds),
        n: pairs.len(),
        validity: rads::validity(&outs)?,
        accuracy: rads::accuracy(&outs, &cats)?,
    })
}

/// RADS validity/accuracy of a zero-shot and a k-shot run over the same samples, with per-system changes.
pub fn fewshot_summary(
    base: &[PredictionRecord],
    shots: &[PredictionRecord],
    gts: &GroundTruth,
    k: usize,
) -> Result<FewshotSummary> {
    fn ids(preds: &[PredictionRecord]) -> Vec<&str> {
        let mut v: Vec<&str> = preds
            .iter()
            .filter(|p| p.task == TaskKind::RadsAssignment)
            .map(|p| p.sample_id.as_str())
            .collect();
        v.sort_unstable();
        v
    }
    if ids(base) != ids(shots) {
        return Err(Error::Misaligned {
            task: TaskKind::RadsAssignment.to_string(),
            detail: "zero-shot and few-shot runs cover different samples".into(),
        });
    }
    let base_pairs = rads_pairs(base, gts)?;
    let shot_pairs = rads_pairs(shots, gts)?;
    let by_base = system_accuracy(base, gts)?;
    let by_shots = system_accuracy(shots, gts)?;
    let systems = by_base
        .iter()
        .map(|(&system, b)| {
            let s = by_shots[&system];
            SystemDelta { system, n: b.n, base: b.accuracy(), shots: s.accuracy(), delta: s.accuracy() - b.accuracy() }
        })
        .collect();
    Ok(FewshotSummary { k, base: setting(base, &base_pairs)?, shots: setting(shots, &shot_pairs)?, systems })
}
