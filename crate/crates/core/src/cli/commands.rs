use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::path::{Path, PathBuf};
use std::thread;
use std::time::Duration;

use serde::Deserialize;

use radlite::corpus::{
    cap_task, dedupe, format_instruction, ingest, split, DatasetSchema, IngestOutcome, MixtureRecord, MixtureWeights,
    SplitSpec,
};
use radlite::harness::{
    bench_throughput, compare, evaluate, index_ground_truth, oracle_route, read_predictions, run_inference,
    write_predictions, BenchOptions, GroundTruth, HttpClient, MetricName, ModelReports, PredictionRecord, RunConfig,
    TaskReport,
};
use radlite::report::{self, CountsRow, EvalEntry, Rendered, RunManifest};
use radlite::stats::bootstrap_ci;
use radlite::{jsonl, Error, Result, Sample, TaskKind};

use super::{
    AssembleArgs, BenchArgs, Cli, Command, CompareArgs, EvalArgs, FewshotArgs, InferArgs, RouteArgs, SeverityArgs,
};

pub fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Assemble(a) => assemble(cli, a),
        Command::Infer(a) => infer(cli, a),
        Command::Eval(a) => eval(cli, a),
        Command::Compare(a) => compare_cmd(cli, a),
        Command::Severity(a) => severity(cli, a),
        Command::Route(a) => route(cli, a),
        Command::Fewshot(a) => fewshot(cli, a),
        Command::Bench(a) => bench(cli, a),
    }
}

fn manifest<T: serde::Serialize>(cli: &Cli, name: &str, args: &T, inputs: &[&Path]) -> Result<RunManifest> {
    let mut m = RunManifest::new(name, cli.seed, serde_json::to_value(args)?);
    for p in inputs {
        m.add_input(p)?;
    }
    Ok(m)
}

/// Writes each table plus one `<name>.manifest.json` sidecar.
fn emit_all(cli: &Cli, name: &str, mut m: RunManifest, tables: &[(&str, Rendered)]) -> Result<()> {
    for (stem, table) in tables {
        for p in report::emit(&cli.out, stem, table, &m)? {
            println!("{}", p.display());
        }
    }
    m.finish();
    m.write_sidecar(&cli.out.join(format!("{name}.manifest.json")))
}

fn load_truth(path: &Path) -> Result<GroundTruth> {
    index_ground_truth(jsonl::read_records::<Sample>(path)?)
}

fn load_preds(path: &Path) -> Result<Vec<PredictionRecord>> {
    let preds = read_predictions(path)?;
    if preds.is_empty() {
        return Err(Error::InvalidInput(format!("{}: no predictions", path.display())));
    }
    Ok(preds)
}

/// Model label for a prediction file: its model id, or the file stem when two files share one.
fn labels(files: &[(PathBuf, Vec<PredictionRecord>)]) -> Vec<String> {
    let ids: Vec<String> = files.iter().map(|(_, p)| p[0].model_id.clone()).collect();
    ids.iter()
        .zip(files)
        .map(|(id, (path, _))| {
            if ids.iter().filter(|x| *x == id).count() > 1 {
                path.file_stem().map_or(id.clone(), |s| s.to_string_lossy().into_owned())
            } else {
                id.clone()
            }
        })
        .collect()
}

fn expand_inputs(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = std::fs::read_dir(p)
                .map_err(|e| Error::io(p, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == "jsonl"))
                .collect();
            found.sort();
            files.extend(found);
        } else if p.exists() {
            files.push(p.clone());
        } else {
            return Err(Error::io(p, std::io::Error::from(std::io::ErrorKind::NotFound)));
        }
    }
    if files.is_empty() {
        return Err(Error::InvalidInput("no input files".into()));
    }
    Ok(files)
}

fn assemble(cli: &Cli, args: &AssembleArgs) -> Result<()> {
    let schema: DatasetSchema = args.schema.parse().map_err(Error::InvalidInput)?;
    let files = expand_inputs(&args.inputs)?;
    let outcomes: Vec<Result<IngestOutcome>> = thread::scope(|s| {
        let handles: Vec<_> = files.iter().map(|f| s.spawn(move || ingest(f, schema))).collect();
        handles.into_iter().map(|h| h.join().expect("ingest thread")).collect()
    });
    let mut samples = Vec::new();
    let mut rejections = Vec::new();
    let mut ingested: BTreeMap<TaskKind, usize> = BTreeMap::new();
    for o in outcomes {
        let o = o?;
        for s in &o.samples {
            *ingested.entry(s.task).or_default() += 1;
        }
        samples.extend(o.samples);
        rejections.extend(o.rejections);
    }
    let unique = dedupe(samples);
    let mut unique_counts: BTreeMap<TaskKind, usize> = BTreeMap::new();
    for s in &unique {
        *unique_counts.entry(s.task).or_default() += 1;
    }
    let present: HashSet<TaskKind> = unique_counts.keys().copied().collect();
    let spec = SplitSpec::uniform(cli.seed, args.test_size).restricted_to(&present);
    let (mut train, test) = split(unique, &spec)?;

    let caps: BTreeMap<TaskKind, usize> = args.cap_task.iter().copied().collect();
    for &task in unique_counts.keys() {
        let cap = caps.get(&task).copied().unwrap_or(args.cap);
        train = cap_task(train, task, cap, cli.seed)?;
    }

    let mut weights: BTreeMap<TaskKind, f64> = MixtureWeights::default().iter().collect();
    weights.extend(args.weights.iter().copied());
    let weights = MixtureWeights::new(weights)?;
    let epoch_len = args.epoch_len.unwrap_or(train.len());
    let mixture = if train.is_empty() {
        Vec::new()
    } else {
        radlite::corpus::weighted_mixture(&train, &weights, epoch_len, cli.seed)?
    };

    let mut rows = Vec::new();
    for (&task, &n) in &ingested {
        let in_task = |s: &&Sample| s.task == task;
        let sources: BTreeSet<String> = train.iter().chain(&test).filter(in_task).map(|s| s.source_dataset.clone()).collect();
        let modalities: BTreeSet<String> = train.iter().chain(&test).filter(in_task).map(|s| s.modality.clone()).collect();
        rows.push(CountsRow {
            task,
            ingested: n,
            unique: unique_counts.get(&task).copied().unwrap_or(0),
            test: test.iter().filter(in_task).count(),
            train: train.iter().filter(in_task).count(),
            weight: weights.get(task).unwrap_or(1.0),
            mixture_draws: mixture.iter().filter(|s| s.task == task).count(),
            sources: sources.into_iter().collect(),
            modalities: modalities.into_iter().collect(),
        });
    }
    let table = report::counts_table(&rows);
    if args.dry_run {
        print!("{}", table.markdown);
        println!("\n{} rejected lines; nothing written.", rejections.len());
        return Ok(());
    }

    let input_refs: Vec<&Path> = files.iter().map(PathBuf::as_path).collect();
    let m = manifest(cli, "assemble", args, &input_refs)?;
    jsonl::write_records(&cli.out.join("train.jsonl"), &train)?;
    jsonl::write_records(&cli.out.join("test.jsonl"), &test)?;
    let records: Vec<MixtureRecord> =
        mixture.into_iter().enumerate().map(|(draw_index, sample)| MixtureRecord { sample, draw_index }).collect();
    jsonl::write_records(&cli.out.join("mixture.jsonl"), &records)?;
    jsonl::write_records(&cli.out.join("rejects.jsonl"), &rejections)?;
    if !rejections.is_empty() {
        eprintln!("{} lines rejected; see rejects.jsonl", rejections.len());
    }
    emit_all(cli, "assemble", m, &[("counts", table)])
}

fn infer(cli: &Cli, args: &InferArgs) -> Result<()> {
    let mut samples: Vec<Sample> = jsonl::read_records(&args.test)?;
    if !args.tasks.is_empty() {
        samples.retain(|s| args.tasks.contains(&s.task));
    }
    if let Some(n) = args.limit {
        samples.truncate(n);
    }
    let pool: Vec<Sample> = match &args.pool {
        Some(p) => jsonl::read_records(p)?,
        None if args.k > 0 => return Err(Error::InvalidInput("--k > 0 requires --pool".into())),
        None => Vec::new(),
    };
    let mut config = RunConfig {
        endpoint: args.endpoint.clone(),
        model_id: args.model_id.clone(),
        temperature: args.temperature,
        few_shot_k: args.k,
        thinking_enabled: args.thinking,
        seed: cli.seed,
        max_concurrency: args.concurrency,
        retries: args.retries,
        timeout_s: args.timeout,
        ..RunConfig::default()
    };
    config.per_task_max_tokens.extend(args.max_tokens.iter().copied());

    let mut inputs: Vec<&Path> = vec![&args.test];
    inputs.extend(args.pool.as_deref());
    let mut m = RunManifest::new("infer", cli.seed, serde_json::to_value(&config)?);
    for p in inputs {
        m.add_input(p)?;
    }
    let client = HttpClient::new(&config.endpoint, Duration::from_secs(config.timeout_s));
    let records = run_inference(&samples, &config, &client, &pool)?;
    let output = args.output.clone().unwrap_or_else(|| cli.out.join(format!("{}.jsonl", config.model_id)));
    write_predictions(&output, &records)?;
    let failed = records.iter().filter(|r| r.error.is_some()).count();
    if failed > 0 {
        eprintln!("{failed} of {} requests failed; their outputs are empty", records.len());
    }
    println!("{}", output.display());
    m.finish();
    let mut sidecar = output.clone().into_os_string();
    sidecar.push(".manifest.json");
    m.write_sidecar(Path::new(&sidecar))
}

fn eval(cli: &Cli, args: &EvalArgs) -> Result<()> {
    let gts = load_truth(&args.test)?;
    let files: Vec<(PathBuf, Vec<PredictionRecord>)> =
        args.preds.iter().map(|p| load_preds(p).map(|r| (p.clone(), r))).collect::<Result<_>>()?;
    let names = labels(&files);

    let mut entries = Vec::new();
    let mut systems = Vec::new();
    let mut confusions = Vec::new();
    for ((_, preds), name) in files.iter().zip(&names) {
        for r in evaluate(preds, &gts)? {
            let ci = if args.no_ci {
                None
            } else {
                Some(bootstrap_ci(&r.per_sample_scores, args.level, args.resamples, cli.seed)?)
            };
            entries.push(EvalEntry { model_id: name.clone(), report: r, ci });
        }
        if preds.iter().any(|p| p.task == TaskKind::RadsAssignment) {
            systems.push((name.clone(), report::system_accuracy(preds, &gts)?));
        }
        if preds.iter().any(|p| p.task == TaskKind::Nli) {
            confusions.push((name.clone(), report::nli_confusion(preds, &gts)?));
        }
    }
    let mut inputs: Vec<&Path> = vec![&args.test];
    inputs.extend(args.preds.iter().map(PathBuf::as_path));
    let m = manifest(cli, "eval", args, &inputs)?;
    let mut tables = vec![("eval", report::eval_table(&entries))];
    if !systems.is_empty() {
        tables.push(("rads_systems", report::rads_system_table(&systems)));
    }
    if !confusions.is_empty() {
        tables.push(("nli_confusion", report::nli_confusion_table(&confusions)));
    }
    emit_all(cli, "eval", m, &tables)
}

fn compare_cmd(cli: &Cli, args: &CompareArgs) -> Result<()> {
    let gts = load_truth(&args.test)?;
    let files = vec![(args.a.clone(), load_preds(&args.a)?), (args.b.clone(), load_preds(&args.b)?)];
    let names = labels(&files);
    let result = compare(&files[0].1, &files[1].1, &gts)?;
    let m = manifest(cli, "compare", args, &[&args.test, &args.a, &args.b])?;
    emit_all(cli, "compare", m, &[("compare", report::compare_table(&result, &names[0], &names[1]))])
}

fn severity(cli: &Cli, args: &SeverityArgs) -> Result<()> {
    let gts = load_truth(&args.test)?;
    let files: Vec<(PathBuf, Vec<PredictionRecord>)> =
        args.preds.iter().map(|p| load_preds(p).map(|r| (p.clone(), r))).collect::<Result<_>>()?;
    let names = labels(&files);
    let summaries = files
        .iter()
        .zip(names)
        .map(|((_, preds), name)| {
            let mut s = report::severity_summary(preds, &gts)?;
            s.model_id = name;
            Ok(s)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut inputs: Vec<&Path> = vec![&args.test];
    inputs.extend(args.preds.iter().map(PathBuf::as_path));
    let m = manifest(cli, "severity", args, &inputs)?;
    emit_all(cli, "severity", m, &[("severity", report::severity_table(&summaries))])
}

#[derive(Debug, Deserialize)]
struct EvalRow {
    model_id: String,
    task: TaskKind,
    metric: MetricName,
    value: f64,
    n: usize,
}

fn route(cli: &Cli, args: &RouteArgs) -> Result<()> {
    let mut by_model: Vec<(String, Vec<TaskReport>)> = Vec::new();
    for path in &args.reports {
        let mut reader = report::csv_reader(path)?;
        for row in reader.deserialize::<EvalRow>() {
            let row = row.map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
            let report = TaskReport {
                task: row.task,
                metric: row.metric,
                value: row.value,
                n: row.n,
                per_sample_scores: Vec::new(),
                sample_ids: Vec::new(),
            };
            match by_model.iter_mut().find(|(m, _)| *m == row.model_id) {
                Some((_, reports)) => reports.push(report),
                None => by_model.push((row.model_id, vec![report])),
            }
        }
    }
    let pick = |id: &str| {
        by_model
            .iter()
            .find(|(m, _)| m == id)
            .map(|(m, r)| ModelReports { model_id: m.clone(), reports: r.clone() })
            .ok_or_else(|| Error::InvalidInput(format!("model `{id}` not found in reports")))
    };
    let (a, b) = match args.models.as_slice() {
        [a, b] => (pick(a)?, pick(b)?),
        [] if by_model.len() == 2 => (pick(&by_model[0].0)?, pick(&by_model[1].0)?),
        [] => {
            return Err(Error::InvalidInput(format!(
                "reports contain {} models; choose two with --models A,B",
                by_model.len()
            )))
        }
        _ => return Err(Error::InvalidInput("--models takes exactly two ids".into())),
    };
    let table = oracle_route(&a, &b)?;
    let inputs: Vec<&Path> = args.reports.iter().map(PathBuf::as_path).collect();
    let m = manifest(cli, "route", args, &inputs)?;
    emit_all(cli, "route", m, &[("route", report::route_table(&table))])
}

fn fewshot(cli: &Cli, args: &FewshotArgs) -> Result<()> {
    let gts = load_truth(&args.test)?;
    let summary = report::fewshot_summary(&load_preds(&args.base)?, &load_preds(&args.shots)?, &gts, args.k)?;
    let m = manifest(cli, "fewshot", args, &[&args.test, &args.base, &args.shots])?;
    emit_all(cli, "fewshot", m, &[("fewshot", report::fewshot_table(&summary))])
}

fn bench(cli: &Cli, args: &BenchArgs) -> Result<()> {
    let mut prompts: Vec<String> = if args.prompts.extension().is_some_and(|e| e == "jsonl") {
        jsonl::read_records::<Sample>(&args.prompts)?.iter().map(format_instruction).collect()
    } else {
        std::fs::read_to_string(&args.prompts)
            .map_err(|e| Error::io(&args.prompts, e))?
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(str::to_string)
            .collect()
    };
    if let Some(n) = args.limit {
        prompts.truncate(n);
    }
    let config = RunConfig {
        endpoint: args.endpoint.clone(),
        model_id: args.model_id.clone(),
        seed: cli.seed,
        retries: args.retries,
        timeout_s: args.timeout,
        ..RunConfig::default()
    };
    let options = BenchOptions {
        warmup: args.warmup,
        max_tokens: args.max_tokens,
        threads: args.threads,
        quantization: args.quantization.clone(),
    };
    let client = HttpClient::new(&config.endpoint, Duration::from_secs(config.timeout_s));
    let result = bench_throughput(&client, &config, &prompts, &options)?;
    let m = manifest(cli, "bench", args, &[&args.prompts])?;
    emit_all(cli, "bench", m, &[("bench", report::bench_table(&[result]))])
}
