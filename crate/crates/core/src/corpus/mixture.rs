use std::collections::BTreeMap;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{Sample, TaskKind};
use crate::error::{Error, Result};

/// Per-task sampling multipliers.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureWeights(BTreeMap<TaskKind, f64>);

impl MixtureWeights {
    pub fn new(weights: BTreeMap<TaskKind, f64>) -> Result<Self> {
        if let Some((task, w)) = weights.iter().find(|(_, w)| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidInput(format!("weight for {task} must be positive, got {w}")));
        }
        Ok(MixtureWeights(weights))
    }

    pub fn get(&self, task: TaskKind) -> Option<f64> {
        self.0.get(&task).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (TaskKind, f64)> + '_ {
        self.0.iter().map(|(t, w)| (*t, *w))
    }
}

impl Default for MixtureWeights {
    /// RADS and NLI at 3x, impression and temporal at 1.5x, QA at 0.5x, everything else 1x.
    fn default() -> Self {
        let weights = TaskKind::ALL
            .into_iter()
            .map(|t| {
                let w = match t {
                    TaskKind::RadsAssignment | TaskKind::Nli => 3.0,
                    TaskKind::Impression | TaskKind::Temporal => 1.5,
                    TaskKind::Qa => 0.5,
                    _ => 1.0,
                };
                (t, w)
            })
            .collect();
        MixtureWeights(weights)
    }
}

/// Expected share of draws per task: `w_t * n_t / sum(w_u * n_u)`.
pub fn expected_fractions(
    counts: &BTreeMap<TaskKind, usize>,
    weights: &MixtureWeights,
) -> Result<BTreeMap<TaskKind, f64>> {
    let mut masses = BTreeMap::new();
    for (&task, &n) in counts {
        let w = weights
            .get(task)
            .ok_or_else(|| Error::InvalidInput(format!("no mixture weight for {task}")))?;
        masses.insert(task, w * n as f64);
    }
    let total: f64 = masses.values().sum();
    if total <= 0.0 {
        return Err(Error::Empty("training pool"));
    }
    Ok(masses.into_iter().map(|(t, m)| (t, m / total)).collect())
}

/// Draws `epoch_len` samples with replacement. A draw picks task `t` with
/// probability proportional to `w_t * n_t`, then a uniform sample within `t`.
pub fn weighted_mixture<'a>(
    train: &'a [Sample],
    weights: &MixtureWeights,
    epoch_len: usize,
    seed: u64,
) -> Result<Vec<&'a Sample>> {
    let mut pools: BTreeMap<TaskKind, Vec<&Sample>> = BTreeMap::new();
    for s in train {
        pools.entry(s.task).or_default().push(s);
    }
    if pools.is_empty() {
        return Err(Error::Empty("training pool"));
    }
    let mut tasks = Vec::with_capacity(pools.len());
    let mut masses = Vec::with_capacity(pools.len());
    for (task, pool) in &pools {
        let w = weights
            .get(*task)
            .ok_or_else(|| Error::InvalidInput(format!("no mixture weight for {task}")))?;
        tasks.push(*task);
        masses.push(w * pool.len() as f64);
    }
    let task_dist = WeightedIndex::new(&masses)
        .map_err(|e| Error::InvalidInput(format!("mixture weights: {e}")))?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws = (0..epoch_len)
        .map(|_| {
            let pool = &pools[&tasks[task_dist.sample(&mut rng)]];
            pool[rng.random_range(0..pool.len())]
        })
        .collect();
    Ok(draws)
}

/// Mixture file row: the sample fields plus its position in the epoch.
#[derive(Debug, Serialize)]
pub struct MixtureRecord<'a> {
    #[serde(flatten)]
    pub sample: &'a Sample,
    pub draw_index: usize,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::QualityTier;

    fn pool(task: TaskKind, n: usize) -> Vec<Sample> {
        (0..n)
            .map(|i| Sample {
                id: format!("{task}-{i}"),
                task,
                input: format!("input {i}"),
                target: "t".into(),
                source_dataset: "synthetic".into(),
                modality: "CT".into(),
                rads_system: None,
                tier: QualityTier::Bronze,
            })
            .collect()
    }

    #[test]
    fn equal_weights_follow_pool_sizes() {
        let mut train = pool(TaskKind::Qa, 300);
        train.extend(pool(TaskKind::Ner, 100));
        let weights = MixtureWeights::new(TaskKind::ALL.into_iter().map(|t| (t, 2.0)).collect()).unwrap();
        let draws = weighted_mixture(&train, &weights, 200_000, 3).unwrap();
        let qa = draws.iter().filter(|s| s.task == TaskKind::Qa).count() as f64 / draws.len() as f64;
        assert!((qa - 0.75).abs() < 0.005, "qa fraction {qa}");
    }

    #[test]
    fn single_task_pool_draws_only_that_task() {
        let train = pool(TaskKind::MStaging, 10);
        let draws = weighted_mixture(&train, &MixtureWeights::default(), 1000, 1).unwrap();
        assert!(draws.iter().all(|s| s.task == TaskKind::MStaging));
    }

    #[test]
    fn deterministic_per_seed() {
        let mut train = pool(TaskKind::Qa, 50);
        train.extend(pool(TaskKind::Nli, 5));
        let w = MixtureWeights::default();
        let ids = |seed| {
            weighted_mixture(&train, &w, 500, seed)
                .unwrap()
                .iter()
                .map(|s| s.id.clone())
                .collect::<Vec<_>>()
        };
        assert_eq!(ids(9), ids(9));
        assert_ne!(ids(9), ids(10));
    }

    #[test]
    fn rejects_empty_pool_missing_weights_and_bad_weights() {
        assert!(weighted_mixture(&[], &MixtureWeights::default(), 10, 0).is_err());
        let only_qa = MixtureWeights::new([(TaskKind::Qa, 1.0)].into()).unwrap();
        assert!(weighted_mixture(&pool(TaskKind::Ner, 3), &only_qa, 10, 0).is_err());
        assert!(MixtureWeights::new([(TaskKind::Qa, 0.0)].into()).is_err());
        assert!(MixtureWeights::new([(TaskKind::Qa, f64::NAN)].into()).is_err());
    }

    #[test]
    fn mixture_record_flattens_sample_fields() {
        let train = pool(TaskKind::Qa, 1);
        let json = serde_json::to_value(MixtureRecord { sample: &train[0], draw_index: 4 }).unwrap();
        assert_eq!(json["id"], "qa-0");
        assert_eq!(json["task"], "qa");
        assert_eq!(json["draw_index"], 4);
    }
}
