//! Cross-module invariants, checked with generated inputs.

mod common;

use std::collections::{BTreeMap, HashSet};
use std::time::Duration;

use proptest::prelude::*;

use radlite::corpus::{cap_task, dedupe, format_instruction, split, QualityTier, SplitSpec};
use radlite::harness::{
    evaluate, index_ground_truth, oracle_route, run_inference, test_family, write_predictions, HttpClient,
    MetricName, ModelReports, PredictionRecord, RunConfig, TaskReport, TestFamily,
};
use radlite::metrics::{per_label_accuracy, AbnormalityFinding, AbnormalityStatus, Condition};
use radlite::rads::{self, classify_error, severity_report, ErrorDirection, Inventory, ParseOutcome, RadsSystem};
use radlite::report::{eval_table, EvalEntry, RunManifest};
use radlite::stats::{
    bootstrap_ci, confusion_matrix, mcnemar_counts, wilcoxon_signed_rank, DiscordantCounts,
};
use radlite::{jsonl, Sample, TaskKind};

use common::{canned_reply, fixture, StubServer};

fn task_strategy() -> impl Strategy<Value = TaskKind> {
    prop::sample::select(TaskKind::ALL.to_vec())
}

fn make_sample(id: usize, task: TaskKind, input: String) -> Sample {
    Sample {
        id: format!("s{id}"),
        task,
        input,
        target: "t".into(),
        source_dataset: "d".into(),
        modality: "m".into(),
        rads_system: (task == TaskKind::RadsAssignment).then_some(RadsSystem::PiRads),
        tier: QualityTier::Silver,
    }
}

fn corpus_strategy() -> impl Strategy<Value = Vec<Sample>> {
    // Few distinct inputs and optional padding so duplicates are common.
    prop::collection::vec((task_strategy(), 0..12u8, any::<bool>()), 0..120).prop_map(|rows| {
        rows.into_iter()
            .enumerate()
            .map(|(i, (task, k, pad))| {
                let text = format!("input {k}");
                make_sample(i, task, if pad { format!("  {text}\n") } else { text })
            })
            .collect()
    })
}

fn counts(samples: &[Sample]) -> BTreeMap<TaskKind, usize> {
    let mut m = BTreeMap::new();
    for s in samples {
        *m.entry(s.task).or_default() += 1;
    }
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dedupe_is_idempotent(samples in corpus_strategy()) {
        let once = dedupe(samples);
        prop_assert_eq!(dedupe(once.clone()), once);
    }

    #[test]
    fn split_partitions_each_task(samples in corpus_strategy(), per_task in 0usize..4, seed in any::<u64>()) {
        let samples = dedupe(samples);
        let present: HashSet<TaskKind> = samples.iter().map(|s| s.task).collect();
        let have = counts(&samples);
        let spec = SplitSpec::uniform(seed, per_task).restricted_to(&present);
        match split(samples.clone(), &spec) {
            Ok((train, test)) => {
                prop_assert_eq!(train.len() + test.len(), samples.len());
                let train_ids: HashSet<&str> = train.iter().map(|s| s.id.as_str()).collect();
                prop_assert!(test.iter().all(|s| !train_ids.contains(s.id.as_str())));
                for (task, n) in counts(&test) {
                    prop_assert_eq!(n, per_task);
                    prop_assert!(have[&task] >= per_task);
                }
            }
            Err(_) => prop_assert!(have.values().any(|&n| n < per_task)),
        }
    }

    #[test]
    fn cap_leaves_other_tasks_alone(samples in corpus_strategy(), task in task_strategy(), cap in 1usize..10) {
        let before = counts(&samples);
        let after = counts(&cap_task(samples, task, cap, 1).unwrap());
        for (t, n) in &before {
            if *t == task {
                prop_assert_eq!(after.get(t).copied().unwrap_or(0), (*n).min(cap));
            } else {
                prop_assert_eq!(after.get(t), Some(n));
            }
        }
    }

    #[test]
    fn prompt_starts_with_task_tag(task in task_strategy(), input in "[a-zA-Z .]{1,40}") {
        let s = make_sample(0, task, format!("x{input}"));
        let expected = format!("[TASK: {}]", task.as_str());
        prop_assert!(format_instruction(&s).starts_with(&expected));
    }

    #[test]
    fn direction_swaps_with_arguments(i in 0usize..66, j in 0usize..66) {
        let entries = Inventory::shipped().entries();
        let (x, y) = (entries[i % entries.len()].category(), entries[j % entries.len()].category());
        let forward = classify_error(&ParseOutcome::Valid(x.clone()), &y);
        let backward = classify_error(&ParseOutcome::Valid(y), &x);
        let swapped = match forward {
            ErrorDirection::Undercall => ErrorDirection::Overcall,
            ErrorDirection::Overcall => ErrorDirection::Undercall,
            other => other,
        };
        prop_assert_eq!(backward, swapped);
    }

    #[test]
    fn severity_counts_sum_to_n(picks in prop::collection::vec((0usize..66, 0usize..66, any::<bool>()), 1..60)) {
        let entries = Inventory::shipped().entries();
        let pairs: Vec<(String, _)> = picks
            .iter()
            .map(|&(p, g, garble)| {
                let pred = if garble { "unclear".to_string() } else { entries[p % entries.len()].category().canonical() };
                (pred, entries[g % entries.len()].category())
            })
            .collect();
        let r = severity_report(&pairs);
        prop_assert_eq!(r.counts.values().sum::<usize>(), pairs.len());
        prop_assert_eq!(
            r.directed_errors(),
            r.n - r.count(ErrorDirection::Exact) - r.count(ErrorDirection::CrossSystemUndefined)
        );
    }

    #[test]
    fn validity_is_monotone(outs in prop::collection::vec("(BI-RADS [1-5]|noise)", 1..30)) {
        let base = rads::validity(&outs).unwrap();
        let mut more = outs.clone();
        more.push("PI-RADS 3".into());
        prop_assert!(rads::validity(&more).unwrap() >= base);
        let mut less = outs;
        less.push("nothing".into());
        prop_assert!(rads::validity(&less).unwrap() <= base);
    }

    #[test]
    fn per_label_accuracy_ignores_order(
        statuses in prop::collection::vec(0usize..3, 14),
        guesses in prop::collection::vec(0usize..3, 14),
        seed in any::<u64>(),
    ) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let st = [AbnormalityStatus::Positive, AbnormalityStatus::Negative, AbnormalityStatus::Uncertain];
        let gt: Vec<AbnormalityFinding> = Condition::ALL
            .iter()
            .zip(&statuses)
            .map(|(c, s)| AbnormalityFinding { condition: *c, status: st[*s] })
            .collect();
        let mut lines: Vec<String> = Condition::ALL
            .iter()
            .zip(&guesses)
            .map(|(c, g)| format!("{c}: {:?}", st[*g]))
            .collect();
        let reference = per_label_accuracy(&lines.join("\n"), &gt).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        lines.shuffle(&mut rng);
        let mut gt_shuffled = gt.clone();
        gt_shuffled.shuffle(&mut rng);
        prop_assert_eq!(per_label_accuracy(&lines.join("\n"), &gt_shuffled).unwrap(), reference);
    }

    #[test]
    fn mcnemar_is_symmetric(b in 0usize..80, c in 0usize..80) {
        prop_assume!(b + c > 0);
        let ab = mcnemar_counts(DiscordantCounts { a_only: b, b_only: c }).unwrap();
        let ba = mcnemar_counts(DiscordantCounts { a_only: c, b_only: b }).unwrap();
        prop_assert_eq!(ab.p_value, ba.p_value);
        prop_assert!((0.0..=1.0).contains(&ab.p_value));
    }

    #[test]
    fn wilcoxon_ignores_sign_flip(diffs in prop::collection::vec(-50i32..50, 12..40)) {
        prop_assume!(diffs.iter().filter(|d| **d != 0).count() >= 10);
        let zeros = vec![0.0; diffs.len()];
        let d: Vec<f64> = diffs.iter().map(|&x| x as f64).collect();
        let neg: Vec<f64> = d.iter().map(|x| -x).collect();
        let a = wilcoxon_signed_rank(&d, &zeros).unwrap();
        let b = wilcoxon_signed_rank(&neg, &zeros).unwrap();
        prop_assert_eq!(a.statistic, b.statistic);
        prop_assert_eq!(a.p_value, b.p_value);
    }

    #[test]
    fn bootstrap_contains_mean(scores in prop::collection::vec(0.0f64..1.0, 2..60), seed in any::<u64>()) {
        let ci = bootstrap_ci(&scores, 0.95, 1000, seed).unwrap();
        let mean = scores.iter().sum::<f64>() / scores.len() as f64;
        prop_assert!(ci.lower <= mean + 1e-12 && mean <= ci.upper + 1e-12, "{:?} vs {}", ci, mean);
    }

    #[test]
    fn confusion_total_is_input_length(rows in prop::collection::vec((0usize..3, prop::option::of(0usize..3)), 1..80)) {
        let labels = ["entailment", "contradiction", "neutral"];
        let truths: Vec<&str> = rows.iter().map(|(t, _)| labels[*t]).collect();
        let preds: Vec<Option<&str>> = rows.iter().map(|(_, p)| p.map(|i| labels[i])).collect();
        prop_assert_eq!(confusion_matrix(&preds, &truths, &labels).unwrap().total(), rows.len());
    }

    #[test]
    fn oracle_dominates_both(values in prop::collection::vec((0u8..5, 0u8..5), 10)) {
        let keys: Vec<(TaskKind, MetricName)> = TaskKind::ALL
            .into_iter()
            .flat_map(|t| MetricName::for_task(t).iter().map(move |m| (t, *m)))
            .collect();
        let build = |pick: fn(&(u8, u8)) -> u8, id: &str| ModelReports {
            model_id: id.into(),
            reports: keys
                .iter()
                .zip(&values)
                .map(|(&(task, metric), v)| TaskReport {
                    task, metric, value: pick(v) as f64 / 4.0, n: 1, per_sample_scores: vec![], sample_ids: vec![],
                })
                .collect(),
        };
        let table = oracle_route(&build(|v| v.0, "a"), &build(|v| v.1, "b")).unwrap();
        for row in table.rows {
            prop_assert!(row.oracle >= row.value_a && row.oracle >= row.value_b);
            prop_assert!(row.oracle == row.value_a || row.oracle == row.value_b);
            prop_assert_eq!(row.tie, row.value_a == row.value_b);
        }
    }
}

#[test]
fn bootstrap_narrows_with_n() {
    let draw = |n: usize| -> Vec<f64> { (0..n).map(|i| ((i * 7919) % 1000) as f64 / 1000.0).collect() };
    let small = bootstrap_ci(&draw(100), 0.95, 2000, 3).unwrap();
    let large = bootstrap_ci(&draw(1000), 0.95, 2000, 3).unwrap();
    assert!(large.upper - large.lower < small.upper - small.lower);
}

#[test]
fn identical_inventory_category_is_exact() {
    for entry in Inventory::shipped().entries() {
        let c = entry.category();
        assert_eq!(classify_error(&ParseOutcome::Valid(c.clone()), &c), ErrorDirection::Exact, "{c}");
    }
}

#[test]
fn compare_dispatch_covers_every_task() {
    for task in TaskKind::ALL {
        let want = match task {
            TaskKind::RadsAssignment | TaskKind::Nli | TaskKind::NStaging | TaskKind::MStaging => TestFamily::McNemar,
            _ => TestFamily::Wilcoxon,
        };
        assert_eq!(test_family(task), want, "{task}");
    }
}

#[test]
fn evaluate_ignores_prediction_order() {
    let gts = index_ground_truth(jsonl::read_records(&fixture("test.jsonl")).unwrap()).unwrap();
    let mut preds: Vec<PredictionRecord> = radlite::harness::read_predictions(&fixture("preds/b_ft.jsonl")).unwrap();
    let reference = evaluate(&preds, &gts).unwrap();
    preds.reverse();
    preds.rotate_left(1234);
    let shuffled = evaluate(&preds, &gts).unwrap();
    for (a, b) in reference.iter().zip(&shuffled) {
        assert_eq!((a.task, a.metric, a.value, a.n), (b.task, b.metric, b.value, b.n));
    }
}

#[test]
fn sequential_inference_is_byte_identical() {
    let stub = StubServer::canned(canned_reply, 5, Duration::ZERO);
    let all: Vec<Sample> = jsonl::read_records(&fixture("test.jsonl")).unwrap();
    let input: Vec<Sample> = all.into_iter().step_by(150).collect();
    let config = RunConfig { endpoint: stub.url.clone(), model_id: "m".into(), ..RunConfig::default() };
    let client = HttpClient::new(&stub.url, Duration::from_secs(10));
    let dir = tempfile::tempdir().unwrap();
    let mut bytes = Vec::new();
    for run in 0..2 {
        let path = dir.path().join(format!("run{run}.jsonl"));
        write_predictions(&path, &run_inference(&input, &config, &client, &[]).unwrap()).unwrap();
        bytes.push(std::fs::read(path).unwrap());
    }
    assert_eq!(bytes[0], bytes[1]);
}

#[test]
fn csv_and_markdown_agree_on_values() {
    let gts = index_ground_truth(jsonl::read_records(&fixture("test.jsonl")).unwrap()).unwrap();
    let mut entries = Vec::new();
    for (name, file) in [("model-a", "preds/a_ft.jsonl"), ("model-b", "preds/b_ft.jsonl")] {
        let preds = radlite::harness::read_predictions(&fixture(file)).unwrap();
        for r in evaluate(&preds, &gts).unwrap() {
            entries.push(EvalEntry { model_id: name.into(), report: r, ci: None });
        }
    }
    let table = eval_table(&entries);
    let manifest = RunManifest::new("eval", 42, serde_json::json!({}));
    let csv = table.to_csv(&manifest).unwrap();
    let md = table.to_markdown(&manifest);
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(csv.as_bytes());
    let headers = reader.headers().unwrap().clone();
    let col = headers.iter().position(|h| h == "value").unwrap();
    let mut checked = 0;
    for rec in reader.records() {
        let v: f64 = rec.unwrap()[col].parse().unwrap();
        assert!(md.contains(&format!(" {v:.3} ")), "{v:.3} missing from markdown");
        checked += 1;
    }
    assert_eq!(checked, entries.len());
}
