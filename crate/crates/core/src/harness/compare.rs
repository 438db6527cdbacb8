use serde::Serialize;

use super::evaluate::{evaluate, GroundTruth, MetricName, TaskReport};
use super::PredictionRecord;
use crate::corpus::TaskKind;
use crate::error::{Error, Result};
use crate::stats::{mcnemar, significance_stars, wilcoxon_signed_rank, TestMethod, TestResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TestFamily {
    McNemar,
    Wilcoxon,
}

/// Label-accuracy tasks use McNemar; real-valued per-sample metrics use Wilcoxon.
pub fn test_family(task: TaskKind) -> TestFamily {
    match task {
        TaskKind::RadsAssignment | TaskKind::Nli | TaskKind::NStaging | TaskKind::MStaging => TestFamily::McNemar,
        TaskKind::Impression | TaskKind::Ner | TaskKind::Qa | TaskKind::Temporal | TaskKind::Abnormality => {
            TestFamily::Wilcoxon
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub task: TaskKind,
    pub metric: MetricName,
    pub value_a: f64,
    pub value_b: f64,
    pub method: TestMethod,
    pub statistic: f64,
    pub p_value: f64,
    pub stars: &'static str,
    pub n_effective: usize,
    /// The test had nothing to compare (no discordant pairs or too few non-zero differences).
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub rows: Vec<ComparisonRow>,
}

/// Paired significance test per task on the headline metric.
pub fn compare(preds_a: &[PredictionRecord], preds_b: &[PredictionRecord], gts: &GroundTruth) -> Result<ComparisonReport> {
    let ra = evaluate(preds_a, gts)?;
    let rb = evaluate(preds_b, gts)?;
    let headline = |reports: &[TaskReport], task: TaskKind| -> Option<TaskReport> {
        let metric = *MetricName::for_task(task).last().expect("every task has a metric");
        reports.iter().find(|r| r.task == task && r.metric == metric).cloned()
    };
    let mut rows = Vec::new();
    for task in TaskKind::ALL {
        let (a, b) = match (headline(&ra, task), headline(&rb, task)) {
            (Some(a), Some(b)) => (a, b),
            (None, None) => continue,
            _ => {
                return Err(Error::Misaligned { task: task.to_string(), detail: "task predicted by only one model".into() })
            }
        };
        if a.sample_ids != b.sample_ids {
            let detail = match a.sample_ids.iter().zip(&b.sample_ids).find(|(x, y)| x != y) {
                Some((x, y)) => format!("`{x}` vs `{y}`"),
                None => format!("{} vs {} samples", a.sample_ids.len(), b.sample_ids.len()),
            };
            return Err(Error::Misaligned { task: task.to_string(), detail });
        }
        let family = test_family(task);
        let outcome = match family {
            TestFamily::McNemar => {
                let pairs: Vec<(bool, bool)> =
                    a.per_sample_scores.iter().zip(&b.per_sample_scores).map(|(&x, &y)| (x == 1.0, y == 1.0)).collect();
                mcnemar(&pairs)
            }
            TestFamily::Wilcoxon => wilcoxon_signed_rank(&a.per_sample_scores, &b.per_sample_scores),
        };
        let (result, degenerate) = match outcome {
            Ok(r) => (r, false),
            Err(Error::NoDiscordantPairs | Error::InsufficientDifferences { .. }) => (degenerate_result(family), true),
            Err(e) => return Err(e),
        };
        rows.push(ComparisonRow {
            task,
            metric: a.metric,
            value_a: a.value,
            value_b: b.value,
            method: result.method,
            statistic: result.statistic,
            p_value: result.p_value,
            stars: significance_stars(result.p_value),
            n_effective: result.n_effective,
            degenerate,
        });
    }
    Ok(ComparisonReport { rows })
}

fn degenerate_result(family: TestFamily) -> TestResult {
    TestResult {
        statistic: 0.0,
        p_value: 1.0,
        method: match family {
            TestFamily::McNemar => TestMethod::McNemarExact,
            TestFamily::Wilcoxon => TestMethod::WilcoxonNormal,
        },
        n_effective: 0,
    }
}
