use super::{normal_two_sided, TestMethod, TestResult};
use crate::error::{Error, Result};

/// Discordant totals below this use the exact binomial test.
pub const EXACT_THRESHOLD: usize = 25;

/// `a_only`: pairs where only model A is correct; `b_only`: only model B.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DiscordantCounts {
    pub a_only: usize,
    pub b_only: usize,
}

impl DiscordantCounts {
    pub fn from_pairs(pairs: &[(bool, bool)]) -> Self {
        pairs.iter().fold(DiscordantCounts::default(), |mut acc, &(a, b)| {
            match (a, b) {
                (true, false) => acc.a_only += 1,
                (false, true) => acc.b_only += 1,
                _ => {}
            }
            acc
        })
    }

    pub fn total(&self) -> usize {
        self.a_only + self.b_only
    }
}

/// `min(1, 2 * P(X <= k))` for `X ~ Binomial(n, 1/2)`.
pub fn binomial_two_sided(k: usize, n: usize) -> f64 {
    let k = k.min(n - k);
    // Sum C(n, i) for i <= k in floating point; terms are built
    // multiplicatively so n well beyond the exact threshold stays finite.
    let mut term = 1.0f64;
    let mut cdf = 1.0f64;
    for i in 1..=k {
        term *= (n - i + 1) as f64 / i as f64;
        cdf += term;
    }
    (2.0 * cdf / 2f64.powi(n as i32)).min(1.0)
}

/// McNemar's test on per-sample correctness of two models.
pub fn mcnemar(pairs: &[(bool, bool)]) -> Result<TestResult> {
    if pairs.is_empty() {
        return Err(Error::Empty("paired outcomes"));
    }
    mcnemar_counts(DiscordantCounts::from_pairs(pairs))
}

pub fn mcnemar_counts(counts: DiscordantCounts) -> Result<TestResult> {
    let n = counts.total();
    if n == 0 {
        return Err(Error::NoDiscordantPairs);
    }
    let (b, c) = (counts.a_only, counts.b_only);
    if n < EXACT_THRESHOLD {
        return Ok(TestResult {
            statistic: b.min(c) as f64,
            p_value: binomial_two_sided(b.min(c), n),
            method: TestMethod::McNemarExact,
            n_effective: n,
        });
    }
    let diff = b.abs_diff(c) as f64 - 1.0;
    let statistic = diff * diff / n as f64;
    // chi-square(1) survival function equals the two-sided normal tail at sqrt(stat).
    Ok(TestResult {
        statistic,
        p_value: normal_two_sided(statistic.sqrt()),
        method: TestMethod::McNemarChi2,
        n_effective: n,
    })
}
