use std::collections::{BTreeMap, HashSet};

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Sample, TaskKind};
use crate::error::{Error, Result};

/// The RADNLI test set is used whole.
pub const NLI_TEST_SIZE: usize = 480;

/// Keeps the first sample for each distinct input text. Inputs are compared
/// byte-for-byte after trimming surrounding whitespace.
pub fn dedupe(samples: Vec<Sample>) -> Vec<Sample> {
    let mut seen = HashSet::new();
    samples
        .into_iter()
        .filter(|s| seen.insert(s.input.trim().to_string()))
        .collect()
}

fn task_rng(seed: u64, task: TaskKind) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(task.index());
    rng
}

/// Uniformly subsamples `task` down to `cap` samples. Other tasks and the
/// relative order of survivors are untouched.
pub fn cap_task(samples: Vec<Sample>, task: TaskKind, cap: usize, seed: u64) -> Result<Vec<Sample>> {
    if cap == 0 {
        return Err(Error::InvalidInput("cap must be positive".into()));
    }
    let positions: Vec<usize> = samples
        .iter()
        .enumerate()
        .filter(|(_, s)| s.task == task)
        .map(|(i, _)| i)
        .collect();
    if positions.len() <= cap {
        return Ok(samples);
    }
    let mut rng = task_rng(seed, task);
    let keep: HashSet<usize> = index::sample(&mut rng, positions.len(), cap)
        .into_iter()
        .map(|i| positions[i])
        .collect();
    Ok(samples
        .into_iter()
        .enumerate()
        .filter(|(i, s)| s.task != task || keep.contains(i))
        .map(|(_, s)| s)
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitSpec {
    pub seed: u64,
    pub test_size: BTreeMap<TaskKind, usize>,
}

impl SplitSpec {
    /// `per_task` held-out samples for every task; NLI is capped at its full test set.
    pub fn uniform(seed: u64, per_task: usize) -> Self {
        let test_size = TaskKind::ALL
            .into_iter()
            .map(|t| {
                let n = if t == TaskKind::Nli { per_task.min(NLI_TEST_SIZE) } else { per_task };
                (t, n)
            })
            .collect();
        SplitSpec { seed, test_size }
    }

    pub fn restricted_to(mut self, tasks: &HashSet<TaskKind>) -> Self {
        self.test_size.retain(|t, _| tasks.contains(t));
        self
    }
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec::uniform(42, 500)
    }
}

/// Partitions samples into (train, test). Each task contributes exactly
/// `test_size[task]` test samples; tasks absent from the spec go entirely to
/// train. Both halves keep the input order.
pub fn split(samples: Vec<Sample>, spec: &SplitSpec) -> Result<(Vec<Sample>, Vec<Sample>)> {
    let mut by_task: BTreeMap<TaskKind, Vec<usize>> = BTreeMap::new();
    for (i, s) in samples.iter().enumerate() {
        by_task.entry(s.task).or_default().push(i);
    }
    let mut test_positions = HashSet::new();
    for (&task, &want) in &spec.test_size {
        if want == 0 {
            continue;
        }
        let pool = by_task.get(&task).map(Vec::as_slice).unwrap_or(&[]);
        if want > pool.len() {
            return Err(Error::SplitTooLarge {
                task: task.to_string(),
                requested: want,
                available: pool.len(),
            });
        }
        let mut rng = task_rng(spec.seed, task);
        test_positions.extend(index::sample(&mut rng, pool.len(), want).into_iter().map(|i| pool[i]));
    }
    let (test, train): (Vec<_>, Vec<_>) = samples
        .into_iter()
        .enumerate()
        .partition(|(i, _)| test_positions.contains(i));
    Ok((
        train.into_iter().map(|(_, s)| s).collect(),
        test.into_iter().map(|(_, s)| s).collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::QualityTier;
    use crate::rads::RadsSystem;

    fn sample(id: usize, task: TaskKind, input: &str) -> Sample {
        Sample {
            id: format!("{task}-{id}"),
            task,
            input: input.to_string(),
            target: "t".into(),
            source_dataset: "synthetic".into(),
            modality: "CT".into(),
            rads_system: (task == TaskKind::RadsAssignment).then_some(RadsSystem::BiRads),
            tier: QualityTier::Silver,
        }
    }

    fn pool(task: TaskKind, n: usize) -> Vec<Sample> {
        (0..n).map(|i| sample(i, task, &format!("{task} input {i}"))).collect()
    }

    #[test]
    fn dedupe_keeps_first_occurrence() {
        let a = sample(0, TaskKind::Qa, "same");
        let b = sample(1, TaskKind::Qa, "other");
        let a2 = sample(2, TaskKind::Qa, "same");
        let out = dedupe(vec![a.clone(), b.clone(), a2]);
        assert_eq!(out, vec![a, b]);
    }

    #[test]
    fn dedupe_trims_but_does_not_fold_case() {
        let out = dedupe(vec![
            sample(0, TaskKind::Qa, "finding"),
            sample(1, TaskKind::Qa, "finding\n"),
            sample(2, TaskKind::Qa, "Finding"),
        ]);
        assert_eq!(out.len(), 2);
        let distinct = pool(TaskKind::Ner, 5);
        assert_eq!(dedupe(distinct.clone()), distinct);
    }

    #[test]
    fn cap_subsamples_one_task_only() {
        let mut all = pool(TaskKind::Impression, 31_000);
        all.extend(pool(TaskKind::Nli, 480));
        let capped = cap_task(all.clone(), TaskKind::Impression, 30_000, 42).unwrap();
        let count = |v: &[Sample], t| v.iter().filter(|s| s.task == t).count();
        assert_eq!(count(&capped, TaskKind::Impression), 30_000);
        assert_eq!(count(&capped, TaskKind::Nli), 480);
        let again = cap_task(all.clone(), TaskKind::Impression, 30_000, 42).unwrap();
        assert_eq!(capped, again);
        let nli = cap_task(all, TaskKind::Nli, 30_000, 42).unwrap();
        assert_eq!(count(&nli, TaskKind::Nli), 480);
        assert!(cap_task(vec![], TaskKind::Nli, 0, 1).is_err());
    }

    #[test]
    fn split_rads_pool_into_train_and_held_out() {
        let samples = pool(TaskKind::RadsAssignment, 9_855);
        let mut spec = SplitSpec::uniform(42, 500);
        spec.test_size.retain(|t, _| *t == TaskKind::RadsAssignment);
        let (train, test) = split(samples, &spec).unwrap();
        assert_eq!(train.len(), 9_355);
        assert_eq!(test.len(), 500);
        let train_ids: HashSet<_> = train.iter().map(|s| &s.id).collect();
        assert!(test.iter().all(|s| !train_ids.contains(&s.id)));
    }

    #[test]
    fn split_nli_uses_full_set() {
        let mut spec = SplitSpec::default();
        spec.test_size.retain(|t, _| *t == TaskKind::Nli);
        assert_eq!(spec.test_size[&TaskKind::Nli], 480);
        let (train, test) = split(pool(TaskKind::Nli, 480), &spec).unwrap();
        assert!(train.is_empty());
        assert_eq!(test.len(), 480);
    }

    #[test]
    fn split_is_deterministic_and_rejects_oversized_requests() {
        let mut samples = pool(TaskKind::Qa, 700);
        samples.extend(pool(TaskKind::Ner, 600));
        let mut spec = SplitSpec::uniform(42, 500);
        spec.test_size.retain(|t, _| matches!(t, TaskKind::Qa | TaskKind::Ner));
        let ids = |v: &[Sample]| v.iter().map(|s| s.id.clone()).collect::<Vec<_>>();
        let (_, a) = split(samples.clone(), &spec).unwrap();
        let (_, b) = split(samples.clone(), &spec).unwrap();
        assert_eq!(ids(&a), ids(&b));
        spec.seed = 7;
        let (_, c) = split(samples.clone(), &spec).unwrap();
        assert_ne!(ids(&a), ids(&c));

        spec.test_size.insert(TaskKind::Ner, 601);
        assert!(matches!(split(samples, &spec), Err(Error::SplitTooLarge { available: 600, .. })));
    }
}
