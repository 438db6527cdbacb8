use std::collections::BTreeMap;

use super::analysis::{FewshotSummary, SeveritySummary};
use super::{fixed3, markdown_table, Align, Field, Rendered};
use crate::corpus::TaskKind;
use crate::harness::{BenchReport, ComparisonReport, MetricName, RouteTable, TaskReport};
use crate::rads::{ErrorDirection, RadsSystem, SystemAccuracy};
use crate::stats::{ConfidenceInterval, ConfusionMatrix};

fn metric_short(m: MetricName) -> &'static str {
    match m {
        MetricName::Val => "Val",
        MetricName::Acc => "Acc",
        MetricName::RougeL => "RL",
        MetricName::Jaccard => "Jac",
        MetricName::LabelAcc => "LA",
    }
}

fn signed3(v: f64) -> String {
    if v < 0.0 {
        format!("-{:.3}", -v)
    } else {
        format!("+{v:.3}")
    }
}

fn pct1(v: f64) -> String {
    format!("{:.1}%", v * 100.0)
}

fn first_seen<T: PartialEq + Clone>(items: impl IntoIterator<Item = T>) -> Vec<T> {
    let mut out = Vec::new();
    for i in items {
        if !out.contains(&i) {
            out.push(i);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalEntry {
    pub model_id: String,
    pub report: TaskReport,
    pub ci: Option<ConfidenceInterval>,
}

/// One row per (model, task, metric); markdown puts models side by side.
pub fn eval_table(entries: &[EvalEntry]) -> Rendered {
    let rows = entries
        .iter()
        .map(|e| {
            vec![
                e.model_id.clone().into(),
                e.report.task.as_str().into(),
                e.report.metric.as_str().into(),
                e.report.value.into(),
                e.report.n.into(),
                e.ci.map(|c| c.lower).into(),
                e.ci.map(|c| c.upper).into(),
                e.ci.map(|c| c.level).into(),
            ]
        })
        .collect();

    let models = first_seen(entries.iter().map(|e| e.model_id.clone()));
    let mut keys: Vec<(TaskKind, MetricName)> = first_seen(entries.iter().map(|e| (e.report.task, e.report.metric)));
    keys.sort_by_key(|&(t, m)| (TaskKind::ALL.iter().position(|x| *x == t), m));
    let mut headers = vec!["Task", "Metric", "n"];
    headers.extend(models.iter().map(String::as_str));
    let md_rows: Vec<Vec<String>> = keys
        .iter()
        .map(|&(task, metric)| {
            let find = |m: &str| entries.iter().find(|e| e.model_id == m && e.report.task == task && e.report.metric == metric);
            let n = models.iter().find_map(|m| find(m)).map_or(0, |e| e.report.n);
            let mut row = vec![task.display_name().to_string(), metric_short(metric).to_string(), n.to_string()];
            row.extend(models.iter().map(|m| find(m).map_or("-".into(), |e| fixed3(e.report.value))));
            row
        })
        .collect();
    let mut align = vec![Align::Left, Align::Left, Align::Right];
    align.extend(models.iter().map(|_| Align::Center));
    Rendered {
        columns: vec!["model_id", "task", "metric", "value", "n", "ci_lower", "ci_upper", "ci_level"],
        rows,
        markdown: markdown_table(&headers, &align, &md_rows),
    }
}

pub fn route_table(table: &RouteTable) -> Rendered {
    let rows = table
        .rows
        .iter()
        .map(|r| {
            vec![
                r.task.as_str().into(),
                r.metric.as_str().into(),
                table.model_a.as_str().into(),
                table.model_b.as_str().into(),
                r.value_a.into(),
                r.value_b.into(),
                r.oracle.into(),
                r.routed_to.as_str().into(),
                (if r.tie { "true" } else { "false" }).into(),
            ]
        })
        .collect();
    let md_rows: Vec<Vec<String>> = table
        .rows
        .iter()
        .map(|r| {
            vec![
                r.task.display_name().to_string(),
                metric_short(r.metric).to_string(),
                fixed3(r.value_a),
                fixed3(r.value_b),
                fixed3(r.oracle),
                if r.tie { "tie".to_string() } else { r.routed_to.clone() },
            ]
        })
        .collect();
    let headers = ["Task", "Metric", table.model_a.as_str(), table.model_b.as_str(), "Oracle", "Routed to"];
    let align = [Align::Left, Align::Left, Align::Center, Align::Center, Align::Center, Align::Left];
    Rendered {
        columns: vec!["task", "metric", "model_a", "model_b", "value_a", "value_b", "oracle", "routed_to", "tie"],
        rows,
        markdown: markdown_table(&headers, &align, &md_rows),
    }
}

fn comparison_label(task: TaskKind) -> &'static str {
    match task {
        TaskKind::RadsAssignment => "RADS Accuracy",
        other => other.display_name(),
    }
}

pub fn compare_table(report: &ComparisonReport, model_a: &str, model_b: &str) -> Rendered {
    let rows = report
        .rows
        .iter()
        .map(|r| {
            vec![
                r.task.as_str().into(),
                r.metric.as_str().into(),
                model_a.into(),
                model_b.into(),
                r.value_a.into(),
                r.value_b.into(),
                r.method.as_str().into(),
                r.statistic.into(),
                r.p_value.into(),
                r.stars.into(),
                r.n_effective.into(),
                (if r.degenerate { "true" } else { "false" }).into(),
            ]
        })
        .collect();
    let md_rows: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| {
            let p = if r.p_value < 0.001 { "<0.001".to_string() } else { fixed3(r.p_value) };
            vec![
                comparison_label(r.task).to_string(),
                fixed3(r.value_a),
                fixed3(r.value_b),
                r.method.family().to_string(),
                format!("{p} ({})", r.stars),
            ]
        })
        .collect();
    Rendered {
        columns: vec![
            "task",
            "metric",
            "model_a",
            "model_b",
            "value_a",
            "value_b",
            "method",
            "statistic",
            "p_value",
            "stars",
            "n_effective",
            "degenerate",
        ],
        rows,
        markdown: markdown_table(
            &["Task", model_a, model_b, "Test", "p-value"],
            &[Align::Left, Align::Center, Align::Center, Align::Center, Align::Center],
            &md_rows,
        ),
    }
}

pub fn severity_table(summaries: &[SeveritySummary]) -> Rendered {
    let mut rows: Vec<Vec<Field>> = Vec::new();
    for s in summaries {
        let ratios = s.report.ratios();
        for d in ErrorDirection::ALL {
            let ratio = ratios.map(|r| match d {
                ErrorDirection::Undercall => Some(r.undercall),
                ErrorDirection::Overcall => Some(r.overcall),
                ErrorDirection::SafeMisclassify => Some(r.safe),
                _ => None,
            });
            rows.push(vec![
                s.model_id.as_str().into(),
                d.as_str().into(),
                s.report.count(d).into(),
                s.report.share_of_classified(d).into(),
                ratio.flatten().into(),
            ]);
        }
        for (&dist, &count) in &s.adjacency.histogram {
            rows.push(vec![
                s.model_id.as_str().into(),
                format!("rank_distance_{dist}").into(),
                count.into(),
                s.adjacency.fraction_at(dist).into(),
                Field::Empty,
            ]);
        }
    }

    let cell = |s: &SeveritySummary, d: ErrorDirection| match s.report.share_of_classified(d) {
        Some(share) => format!("{} ({})", s.report.count(d), pct1(share)),
        None => s.report.count(d).to_string(),
    };
    let ratio = |s: &SeveritySummary, pick: fn(&crate::rads::DirectionRatios) -> f64| {
        s.report.ratios().map_or("-".to_string(), |r| pct1(pick(&r)))
    };
    let line = |label: &str, f: &dyn Fn(&SeveritySummary) -> String| {
        let mut row = vec![label.to_string()];
        row.extend(summaries.iter().map(f));
        row
    };
    let md_rows = vec![
        line("Exact match", &|s| cell(s, ErrorDirection::Exact)),
        line("**Undercall (dangerous)**", &|s| format!("**{}**", cell(s, ErrorDirection::Undercall))),
        line("Overcall (conservative)", &|s| cell(s, ErrorDirection::Overcall)),
        line("Safe misclassify", &|s| cell(s, ErrorDirection::SafeMisclassify)),
        line("Cross-system / undefined", &|s| s.report.count(ErrorDirection::CrossSystemUndefined).to_string()),
        line("Undercall ratio", &|s| ratio(s, |r| r.undercall)),
        line("Overcall ratio", &|s| ratio(s, |r| r.overcall)),
        line("Safe ratio", &|s| ratio(s, |r| r.safe)),
        line("Adjacent-rank errors", &|s| s.adjacency.adjacent_fraction().map_or("-".into(), pct1)),
    ];
    let mut headers = vec!["Error Type"];
    headers.extend(summaries.iter().map(|s| s.model_id.as_str()));
    let mut align = vec![Align::Left];
    align.extend(summaries.iter().map(|_| Align::Center));
    let mut markdown = markdown_table(&headers, &align, &md_rows);
    markdown.push_str(
        "\nCounts show the share of predictions with a defined direction; ratios are shares of directed errors.\n",
    );
    Rendered { columns: vec!["model_id", "error_type", "count", "share", "ratio"], rows, markdown }
}

fn system_order(systems: impl IntoIterator<Item = RadsSystem>) -> Vec<RadsSystem> {
    let mut v: Vec<RadsSystem> = first_seen(systems);
    v.sort_by_key(|s| s.as_str().to_ascii_lowercase());
    v
}

pub fn rads_system_table(models: &[(String, BTreeMap<RadsSystem, SystemAccuracy>)]) -> Rendered {
    let mut rows: Vec<Vec<Field>> = Vec::new();
    for (model, by_system) in models {
        for (system, acc) in by_system {
            rows.push(vec![
                model.as_str().into(),
                system.as_str().into(),
                acc.n.into(),
                acc.correct.into(),
                acc.accuracy().into(),
            ]);
        }
    }
    let systems = system_order(models.iter().flat_map(|(_, m)| m.keys().copied()));
    let best = |vals: &[f64]| -> String {
        if vals.len() < 2 {
            return String::new();
        }
        let max = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let winners: Vec<&str> =
            models.iter().zip(vals).filter(|(_, &v)| v == max).map(|((m, _), _)| m.as_str()).collect();
        if winners.len() > 1 {
            "Tie".into()
        } else {
            winners[0].into()
        }
    };
    let mut md_rows: Vec<Vec<String>> = Vec::new();
    for system in &systems {
        let accs: Vec<SystemAccuracy> = models.iter().map(|(_, m)| m.get(system).copied().unwrap_or_default()).collect();
        let n = accs.iter().map(|a| a.n).max().unwrap_or(0);
        let vals: Vec<f64> = accs.iter().map(SystemAccuracy::accuracy).collect();
        let mut row = vec![system.as_str().to_string(), n.to_string()];
        row.extend(vals.iter().map(|&v| fixed3(v)));
        row.push(best(&vals));
        md_rows.push(row);
    }
    let overall: Vec<SystemAccuracy> = models
        .iter()
        .map(|(_, m)| {
            m.values().fold(SystemAccuracy::default(), |acc, s| SystemAccuracy { n: acc.n + s.n, correct: acc.correct + s.correct })
        })
        .collect();
    let vals: Vec<f64> = overall.iter().map(SystemAccuracy::accuracy).collect();
    let mut total = vec!["**Overall**".to_string(), overall.iter().map(|a| a.n).max().unwrap_or(0).to_string()];
    total.extend(vals.iter().map(|&v| fixed3(v)));
    total.push(best(&vals));
    md_rows.push(total);

    let mut headers = vec!["System", "n"];
    headers.extend(models.iter().map(|(m, _)| m.as_str()));
    headers.push("Best");
    let mut align = vec![Align::Left, Align::Right];
    align.extend(models.iter().map(|_| Align::Center));
    align.push(Align::Left);
    Rendered {
        columns: vec!["model_id", "system", "n", "correct", "accuracy"],
        rows,
        markdown: markdown_table(&headers, &align, &md_rows),
    }
}

pub fn fewshot_table(s: &FewshotSummary) -> Rendered {
    let mut rows: Vec<Vec<Field>> = vec![
        vec!["overall".into(), "validity".into(), s.base.n.into(), s.base.validity.into(), s.shots.validity.into(), (s.shots.validity - s.base.validity).into()],
        vec!["overall".into(), "accuracy".into(), s.base.n.into(), s.base.accuracy.into(), s.shots.accuracy.into(), s.accuracy_delta().into()],
    ];
    for d in &s.systems {
        rows.push(vec!["system".into(), d.system.as_str().into(), d.n.into(), d.base.into(), d.shots.into(), d.delta.into()]);
    }
    let shot_label = format!("{}-shot", s.k);
    let settings = vec![
        vec!["Zero-shot".to_string(), fixed3(s.base.validity), fixed3(s.base.accuracy)],
        vec![shot_label.clone(), fixed3(s.shots.validity), fixed3(s.shots.accuracy)],
        vec!["Change".to_string(), signed3(s.shots.validity - s.base.validity), signed3(s.accuracy_delta())],
    ];
    let mut deltas: Vec<_> = s.systems.iter().collect();
    deltas.sort_by(|a, b| b.delta.total_cmp(&a.delta).then_with(|| a.system.as_str().cmp(b.system.as_str())));
    let per_system: Vec<Vec<String>> = deltas
        .iter()
        .map(|d| vec![d.system.as_str().to_string(), d.n.to_string(), fixed3(d.base), fixed3(d.shots), signed3(d.delta)])
        .collect();
    let mut markdown = markdown_table(&["Setting", "Val", "Acc"], &[Align::Left, Align::Center, Align::Center], &settings);
    markdown.push('\n');
    markdown.push_str(&markdown_table(
        &["System", "n", "Zero-shot", &shot_label, "Change"],
        &[Align::Left, Align::Right, Align::Center, Align::Center, Align::Right],
        &per_system,
    ));
    Rendered { columns: vec!["scope", "label", "n", "zero_shot", "k_shot", "delta"], rows, markdown }
}

pub fn nli_confusion_table(models: &[(String, ConfusionMatrix)]) -> Rendered {
    let mut rows: Vec<Vec<Field>> = Vec::new();
    for (model, m) in models {
        for (label, counts) in m.labels.iter().zip(&m.counts) {
            let mut row: Vec<Field> = vec![model.as_str().into(), label.as_str().into(), counts.iter().sum::<usize>().into()];
            row.extend(counts.iter().map(|&c| Field::from(c)));
            rows.push(row);
        }
    }
    let Some((_, first)) = models.first() else {
        return Rendered { columns: vec![], rows, markdown: String::new() };
    };
    let title = |s: &str| {
        let mut c = s.chars();
        c.next().map(|f| f.to_uppercase().chain(c).collect::<String>()).unwrap_or_default()
    };
    let md_rows: Vec<Vec<String>> = first
        .labels
        .iter()
        .enumerate()
        .map(|(r, label)| {
            let n: usize = first.counts[r].iter().sum();
            let mut row = vec![format!("{} (n={n})", title(label))];
            for c in 0..=first.labels.len() {
                row.push(models.iter().map(|(_, m)| m.counts[r][c].to_string()).collect::<Vec<_>>().join("/"));
            }
            row
        })
        .collect();
    let mut headers = vec!["GT ↓ / Pred →".to_string()];
    headers.extend(first.labels.iter().map(|l| title(l)));
    headers.push(title(ConfusionMatrix::UNPARSED));
    let header_refs: Vec<&str> = headers.iter().map(String::as_str).collect();
    let mut align = vec![Align::Left];
    align.extend((0..=first.labels.len()).map(|_| Align::Center));
    let mut markdown = markdown_table(&header_refs, &align, &md_rows);
    let order: Vec<&str> = models.iter().map(|(m, _)| m.as_str()).collect();
    markdown.push_str(&format!("\nCells show {} counts.\n", order.join(" / ")));
    let mut columns = vec!["model_id", "truth", "n"];
    columns.extend(["entailment", "contradiction", "neutral", ConfusionMatrix::UNPARSED]);
    Rendered { columns, rows, markdown }
}

pub fn bench_table(reports: &[BenchReport]) -> Rendered {
    let rows = reports
        .iter()
        .map(|r| {
            vec![
                r.model_id.as_str().into(),
                r.quantization.clone().into(),
                r.threads.map(|t| t as usize).into(),
                r.model_size_bytes.map(|b| b as usize).into(),
                r.mean_latency_s.into(),
                r.tokens_per_s.into(),
                r.requests.into(),
                r.failed.into(),
                (r.total_tokens as usize).into(),
            ]
        })
        .collect();
    let md_rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            vec![
                r.model_id.clone(),
                r.model_size_bytes.map_or("-".into(), |b| format!("{:.1} GB", b as f64 / 1e9)),
                format!("{} s", fixed3(r.mean_latency_s)),
                fixed3(r.tokens_per_s),
            ]
        })
        .collect();
    let quant = reports.iter().find_map(|r| r.quantization.clone()).unwrap_or_else(|| "Size".into());
    let mut markdown = markdown_table(
        &["Model", &quant, "Latency", "tok/s"],
        &[Align::Left, Align::Center, Align::Center, Align::Center],
        &md_rows,
    );
    if let Some(t) = reports.iter().find_map(|r| r.threads) {
        markdown.push_str(&format!("\n{t} threads.\n"));
    }
    Rendered {
        columns: vec![
            "model_id",
            "quantization",
            "threads",
            "size_bytes",
            "mean_latency_s",
            "tokens_per_s",
            "requests",
            "failed",
            "total_tokens",
        ],
        rows,
        markdown,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CountsRow {
    pub task: TaskKind,
    pub ingested: usize,
    pub unique: usize,
    pub test: usize,
    pub train: usize,
    pub weight: f64,
    pub mixture_draws: usize,
    pub sources: Vec<String>,
    pub modalities: Vec<String>,
}

/// Corpus composition after assembly; "Samples" is the capped training count.
pub fn counts_table(rows: &[CountsRow]) -> Rendered {
    let csv_rows = rows
        .iter()
        .map(|r| {
            vec![
                r.task.as_str().into(),
                r.ingested.into(),
                r.unique.into(),
                r.test.into(),
                r.train.into(),
                r.weight.into(),
                r.mixture_draws.into(),
                r.sources.join(";").into(),
                r.modalities.join(";").into(),
            ]
        })
        .collect();
    let mut sorted: Vec<&CountsRow> = rows.iter().collect();
    sorted.sort_by(|a, b| b.train.cmp(&a.train).then(a.task.cmp(&b.task)));
    let mut md_rows: Vec<Vec<String>> = sorted
        .iter()
        .map(|r| {
            vec![
                r.task.display_name().to_string(),
                r.train.to_string(),
                r.test.to_string(),
                format!("{}", r.weight),
                r.sources.join(", "),
                r.modalities.join(", "),
            ]
        })
        .collect();
    let datasets = first_seen(rows.iter().flat_map(|r| r.sources.iter().cloned())).len();
    md_rows.push(vec![
        "**Total**".into(),
        rows.iter().map(|r| r.train).sum::<usize>().to_string(),
        rows.iter().map(|r| r.test).sum::<usize>().to_string(),
        String::new(),
        format!("{datasets} datasets"),
        String::new(),
    ]);
    Rendered {
        columns: vec!["task", "ingested", "unique", "test", "train", "weight", "mixture_draws", "sources", "modalities"],
        rows: csv_rows,
        markdown: markdown_table(
            &["Task", "Samples", "Test", "Weight", "Source Dataset(s)", "Modality"],
            &[Align::Left, Align::Right, Align::Right, Align::Right, Align::Left, Align::Left],
            &md_rows,
        ),
    }
}
