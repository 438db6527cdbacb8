use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

const MIN_RESAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConfidenceInterval {
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
    pub resamples: usize,
}

/// Percentile bootstrap interval for the mean of `scores`.
///
/// Resample `i` draws from its own ChaCha stream, so the result does not
/// depend on the rayon thread count.
pub fn bootstrap_ci(scores: &[f64], level: f64, resamples: usize, seed: u64) -> Result<ConfidenceInterval> {
    if scores.is_empty() {
        return Err(Error::Empty("bootstrap scores"));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidInput(format!("confidence level {level} outside (0, 1)")));
    }
    if resamples < MIN_RESAMPLES {
        return Err(Error::InvalidInput(format!(
            "{resamples} bootstrap resamples (need at least {MIN_RESAMPLES})"
        )));
    }
    let n = scores.len();
    let mut means: Vec<f64> = (0..resamples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let sum: f64 = (0..n).map(|_| scores[rng.random_range(0..n)]).sum();
            sum / n as f64
        })
        .collect();
    means.sort_by(f64::total_cmp);
    let alpha = (1.0 - level) / 2.0;
    Ok(ConfidenceInterval {
        estimate: scores.iter().sum::<f64>() / n as f64,
        lower: quantile_sorted(&means, alpha),
        upper: quantile_sorted(&means, 1.0 - alpha),
        level,
        resamples,
    })
}

/// Linear interpolation between order statistics (Hyndman-Fan type 7).
pub(crate) fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantile_type7() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile_sorted(&v, 0.0), 1.0);
        assert_eq!(quantile_sorted(&v, 1.0), 4.0);
        assert!((quantile_sorted(&v, 0.5) - 2.5).abs() < 1e-12);
        assert!((quantile_sorted(&v, 0.1) - 1.3).abs() < 1e-12);
    }

    #[test]
    fn deterministic_and_brackets_mean() {
        let scores: Vec<f64> = (0..200).map(|i| (i % 7) as f64 / 6.0).collect();
        let a = bootstrap_ci(&scores, 0.95, 2000, 42).unwrap();
        let b = bootstrap_ci(&scores, 0.95, 2000, 42).unwrap();
        assert_eq!(a, b);
        assert!(a.lower < a.estimate && a.estimate < a.upper);
        let c = bootstrap_ci(&scores, 0.95, 2000, 43).unwrap();
        assert_ne!(a.lower, c.lower);
    }

    #[test]
    fn independent_of_thread_count() {
        let scores: Vec<f64> = (0..50).map(|i| ((i * 37) % 11) as f64).collect();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| bootstrap_ci(&scores, 0.9, 1500, 7).unwrap())
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn constant_scores_collapse() {
        let ci = bootstrap_ci(&[0.5; 30], 0.95, 1000, 1).unwrap();
        assert_eq!((ci.lower, ci.upper), (0.5, 0.5));
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(bootstrap_ci(&[], 0.95, 1000, 0).is_err());
        assert!(bootstrap_ci(&[1.0], 1.0, 1000, 0).is_err());
        assert!(bootstrap_ci(&[1.0], 0.95, 999, 0).is_err());
    }
}
