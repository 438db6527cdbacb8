use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{format_instruction, Sample};
use crate::error::{Error, Result};

/// Prepends up to `k` solved exemplars from `pool` to the prompt for `sample`.
///
/// Exemplars share the query's task and, when it has one, its reporting
/// system; same-task samples fill any shortfall. A pool entry with the
/// query's id or input is never used. Exemplars appear in draw order with
/// the query last, and the draw depends only on `seed` and the query id.
pub fn compose_fewshot(sample: &Sample, pool: &[Sample], k: usize, seed: u64) -> Result<String> {
    if k == 0 {
        return Ok(format_instruction(sample));
    }
    if pool.is_empty() {
        return Err(Error::Empty("few-shot pool"));
    }
    let query_input = sample.input.trim();
    let eligible = |c: &&Sample| c.task == sample.task && c.id != sample.id && c.input.trim() != query_input;
    let (matched, fallback): (Vec<&Sample>, Vec<&Sample>) =
        pool.iter().filter(eligible).partition(|c| c.rads_system == sample.rads_system);

    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ fnv1a(sample.id.as_bytes()));
    let mut chosen = draw(&matched, k, &mut rng);
    if chosen.len() < k {
        let rest = k - chosen.len();
        chosen.extend(draw(&fallback, rest, &mut rng));
    }

    let mut blocks: Vec<String> = chosen
        .iter()
        .map(|ex| format!("{}\n{}", format_instruction(ex), ex.target.trim()))
        .collect();
    blocks.push(format_instruction(sample));
    Ok(blocks.join("\n\n"))
}

fn draw<'a>(candidates: &[&'a Sample], k: usize, rng: &mut ChaCha8Rng) -> Vec<&'a Sample> {
    let amount = k.min(candidates.len());
    index::sample(rng, candidates.len(), amount).into_iter().map(|i| candidates[i]).collect()
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3))
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::corpus::{QualityTier, TaskKind};
    use crate::rads::RadsSystem;

    fn rads(id: &str, system: RadsSystem, input: &str) -> Sample {
        Sample {
            id: id.into(),
            task: TaskKind::RadsAssignment,
            input: input.into(),
            target: format!("{} 3", system.as_str()),
            source_dataset: "d".into(),
            modality: "US".into(),
            rads_system: Some(system),
            tier: QualityTier::Gold,
        }
    }

    fn pool() -> Vec<Sample> {
        let mut p: Vec<Sample> = (0..6).map(|i| rads(&format!("bi{i}"), RadsSystem::BiRads, &format!("breast {i}"))).collect();
        p.extend((0..4).map(|i| rads(&format!("ti{i}"), RadsSystem::TiRads, &format!("thyroid {i}"))));
        p
    }

    #[test]
    fn zero_shot_is_plain_prompt() {
        let q = rads("q", RadsSystem::BiRads, "query");
        assert_eq!(compose_fewshot(&q, &[], 0, 1).unwrap(), format_instruction(&q));
        assert!(compose_fewshot(&q, &[], 3, 1).is_err());
    }

    #[test]
    fn same_system_exemplars_then_query() {
        let q = rads("q", RadsSystem::BiRads, "query");
        let prompt = compose_fewshot(&q, &pool(), 3, 42).unwrap();
        assert_eq!(prompt.matches("[TASK: rads_assignment]").count(), 4);
        assert_eq!(prompt.matches("breast ").count(), 3);
        assert!(!prompt.contains("thyroid"));
        assert!(prompt.ends_with(&format_instruction(&q)));
        assert_eq!(prompt, compose_fewshot(&q, &pool(), 3, 42).unwrap());
    }

    #[test]
    fn shortfall_falls_back_to_task() {
        let q = rads("q", RadsSystem::TiRads, "query");
        let prompt = compose_fewshot(&q, &pool(), 6, 7).unwrap();
        assert_eq!(prompt.matches("thyroid ").count(), 4);
        assert_eq!(prompt.matches("breast ").count(), 2);
    }

    #[test]
    fn query_itself_is_excluded() {
        let q = rads("bi0", RadsSystem::BiRads, "breast 0");
        let prompt = compose_fewshot(&q, &pool(), 5, 3).unwrap();
        assert_eq!(prompt.matches("breast 0").count(), 1);
    }

    proptest! {
        #[test]
        fn never_leaks_query_input(inputs in proptest::collection::vec(0u8..5, 1..20), q in 0u8..5, k in 1usize..6, seed: u64) {
            let pool: Vec<Sample> = inputs
                .iter()
                .enumerate()
                .map(|(i, v)| rads(&format!("p{i}"), RadsSystem::BiRads, &format!("text {v}")))
                .collect();
            let query = rads("query", RadsSystem::BiRads, &format!("text {q}"));
            let prompt = compose_fewshot(&query, &pool, k, seed).unwrap();
            let needle = format!("\ntext {q}\n");
            prop_assert_eq!(prompt.matches(&needle).count(), 1);
        }
    }
}
