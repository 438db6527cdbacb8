use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::PredictionRecord;
use crate::corpus::{Sample, TaskKind};
use crate::error::{Error, Result};
use crate::metrics::{
    parse_abnormality, parse_label, parse_temporal, per_label_accuracy, rouge_l_f1, set_jaccard, LabelSet,
};
use crate::rads::{self, RadsCategory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MetricName {
    Val,
    Acc,
    #[serde(rename = "ROUGE-L")]
    RougeL,
    Jaccard,
    LabelAcc,
}

impl MetricName {
    pub fn as_str(self) -> &'static str {
        match self {
            MetricName::Val => "Val",
            MetricName::Acc => "Acc",
            MetricName::RougeL => "ROUGE-L",
            MetricName::Jaccard => "Jaccard",
            MetricName::LabelAcc => "LabelAcc",
        }
    }

    /// Metrics reported for a task, headline metric last.
    pub fn for_task(task: TaskKind) -> &'static [MetricName] {
        match task {
            TaskKind::RadsAssignment => &[MetricName::Val, MetricName::Acc],
            TaskKind::Impression | TaskKind::Ner | TaskKind::Qa => &[MetricName::RougeL],
            TaskKind::Temporal => &[MetricName::Jaccard],
            TaskKind::Abnormality => &[MetricName::LabelAcc],
            TaskKind::NStaging | TaskKind::MStaging | TaskKind::Nli => &[MetricName::Acc],
        }
    }
}

impl fmt::Display for MetricName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Aggregate score for one (task, metric). Per-sample vectors are kept in
/// memory for significance testing but are not part of the serialized row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskReport {
    pub task: TaskKind,
    pub metric: MetricName,
    pub value: f64,
    pub n: usize,
    #[serde(skip)]
    pub per_sample_scores: Vec<f64>,
    #[serde(skip)]
    pub sample_ids: Vec<String>,
}

/// Test samples keyed by id.
pub type GroundTruth = HashMap<String, Sample>;

pub fn index_ground_truth(samples: Vec<Sample>) -> Result<GroundTruth> {
    let mut map = HashMap::with_capacity(samples.len());
    for s in samples {
        if let Some(prev) = map.insert(s.id.clone(), s) {
            return Err(Error::InvalidInput(format!("duplicate ground-truth id `{}`", prev.id)));
        }
    }
    Ok(map)
}

/// Scores predictions per task. Reports come out in task order and do not
/// depend on the order of `predictions`.
pub fn evaluate(predictions: &[PredictionRecord], gts: &GroundTruth) -> Result<Vec<TaskReport>> {
    let mut by_task: BTreeMap<TaskKind, Vec<(&PredictionRecord, &Sample)>> = BTreeMap::new();
    for p in predictions {
        let gt = gts.get(&p.sample_id).ok_or_else(|| Error::MissingGroundTruth(p.sample_id.clone()))?;
        if gt.task != p.task {
            return Err(Error::TaskMismatch {
                sample_id: p.sample_id.clone(),
                predicted: p.task.to_string(),
                expected: gt.task.to_string(),
            });
        }
        by_task.entry(p.task).or_default().push((p, gt));
    }

    let mut reports = Vec::new();
    for (task, mut pairs) in by_task {
        pairs.sort_by(|a, b| a.0.sample_id.cmp(&b.0.sample_id));
        if let Some(w) = pairs.windows(2).find(|w| w[0].0.sample_id == w[1].0.sample_id) {
            return Err(Error::InvalidInput(format!("duplicate prediction for `{}`", w[0].0.sample_id)));
        }
        let ids: Vec<String> = pairs.iter().map(|(p, _)| p.sample_id.clone()).collect();
        for &metric in MetricName::for_task(task) {
            let scores = pairs
                .iter()
                .map(|(p, gt)| score(task, metric, &p.normalized_output, gt))
                .collect::<Result<Vec<f64>>>()?;
            reports.push(TaskReport {
                task,
                metric,
                value: scores.iter().sum::<f64>() / scores.len() as f64,
                n: scores.len(),
                per_sample_scores: scores,
                sample_ids: ids.clone(),
            });
        }
    }
    Ok(reports)
}

fn indicator(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

fn score(task: TaskKind, metric: MetricName, pred: &str, gt: &Sample) -> Result<f64> {
    let bad_target = |what: &str| Error::InvalidInput(format!("sample {}: target is not a valid {what}", gt.id));
    Ok(match (task, metric) {
        (TaskKind::RadsAssignment, MetricName::Val) => indicator(rads::parse(pred).is_valid()),
        (TaskKind::RadsAssignment, _) => {
            let truth: RadsCategory = rads::parse(&gt.target).category().cloned().ok_or_else(|| bad_target("RADS category"))?;
            indicator(rads::parse(pred).category().is_some_and(|c| c.same_category(&truth)))
        }
        (TaskKind::Impression | TaskKind::Ner | TaskKind::Qa, _) => rouge_l_f1(pred, &gt.target).f1,
        (TaskKind::Temporal, _) => set_jaccard(&parse_temporal(pred).items, &parse_temporal(&gt.target).items),
        (TaskKind::Abnormality, _) => per_label_accuracy(pred, &parse_abnormality(&gt.target))
            .map_err(|_| bad_target("finding list"))?,
        (TaskKind::NStaging | TaskKind::MStaging | TaskKind::Nli, _) => {
            let set = match task {
                TaskKind::NStaging => LabelSet::NStage,
                TaskKind::MStaging => LabelSet::MStage,
                _ => LabelSet::Nli,
            };
            let truth = parse_label(&gt.target, set).ok_or_else(|| bad_target("label"))?;
            indicator(parse_label(pred, set) == Some(truth))
        }
    })
}
