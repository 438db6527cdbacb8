use std::collections::BTreeMap;

use serde::Serialize;

use super::evaluate::{MetricName, TaskReport};
use crate::corpus::TaskKind;
use crate::error::{Error, Result};

/// Reports for one model.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelReports {
    pub model_id: String,
    pub reports: Vec<TaskReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RouteRow {
    pub task: TaskKind,
    pub metric: MetricName,
    pub value_a: f64,
    pub value_b: f64,
    pub routed_to: String,
    pub oracle: f64,
    pub tie: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RouteTable {
    pub model_a: String,
    pub model_b: String,
    pub rows: Vec<RouteRow>,
}

fn keyed(m: &ModelReports) -> Result<BTreeMap<(TaskKind, MetricName), f64>> {
    let mut map = BTreeMap::new();
    for r in &m.reports {
        if map.insert((r.task, r.metric), r.value).is_some() {
            return Err(Error::InvalidInput(format!("{}: duplicate report for {} {}", m.model_id, r.task, r.metric)));
        }
    }
    Ok(map)
}

/// Per (task, metric), routes to whichever model scores higher. Ties go to `a`.
pub fn oracle_route(a: &ModelReports, b: &ModelReports) -> Result<RouteTable> {
    let ka = keyed(a)?;
    let kb = keyed(b)?;
    if let Some(((task, metric), _)) = ka
        .iter()
        .find(|(k, _)| !kb.contains_key(k))
        .or_else(|| kb.iter().find(|(k, _)| !ka.contains_key(k)))
    {
        return Err(Error::CoverageMismatch(format!("{task} {metric} is reported for only one model")));
    }
    let rows = ka
        .into_iter()
        .map(|((task, metric), va)| {
            let vb = kb[&(task, metric)];
            let b_wins = vb > va;
            RouteRow {
                task,
                metric,
                value_a: va,
                value_b: vb,
                routed_to: if b_wins { b.model_id.clone() } else { a.model_id.clone() },
                oracle: va.max(vb),
                tie: va == vb,
            }
        })
        .collect();
    Ok(RouteTable { model_a: a.model_id.clone(), model_b: b.model_id.clone(), rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(task: TaskKind, metric: MetricName, value: f64) -> TaskReport {
        TaskReport { task, metric, value, n: 500, per_sample_scores: vec![], sample_ids: vec![] }
    }

    fn model(id: &str, rows: &[(TaskKind, MetricName, f64)]) -> ModelReports {
        ModelReports { model_id: id.into(), reports: rows.iter().map(|&(t, m, v)| report(t, m, v)).collect() }
    }

    #[test]
    fn routes_and_ties() {
        let a = model(
            "a",
            &[
                (TaskKind::Impression, MetricName::RougeL, 0.502),
                (TaskKind::Ner, MetricName::RougeL, 0.030),
                (TaskKind::NStaging, MetricName::Acc, 0.890),
            ],
        );
        let b = model(
            "b",
            &[
                (TaskKind::Impression, MetricName::RougeL, 0.274),
                (TaskKind::Ner, MetricName::RougeL, 0.950),
                (TaskKind::NStaging, MetricName::Acc, 0.890),
            ],
        );
        let t = oracle_route(&a, &b).unwrap();
        let row = |task| t.rows.iter().find(|r| r.task == task).unwrap();
        assert_eq!((row(TaskKind::Impression).routed_to.as_str(), row(TaskKind::Impression).oracle), ("a", 0.502));
        assert_eq!((row(TaskKind::Ner).routed_to.as_str(), row(TaskKind::Ner).oracle), ("b", 0.950));
        let tie = row(TaskKind::NStaging);
        assert!(tie.tie);
        assert_eq!((tie.routed_to.as_str(), tie.oracle), ("a", 0.890));
    }

    #[test]
    fn coverage_mismatch() {
        let a = model("a", &[(TaskKind::Qa, MetricName::RougeL, 0.1)]);
        let b = model("b", &[(TaskKind::Nli, MetricName::Acc, 0.8)]);
        assert!(matches!(oracle_route(&a, &b), Err(Error::CoverageMismatch(_))));
    }
}
