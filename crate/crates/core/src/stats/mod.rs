//! Paired significance tests, bootstrap intervals and confusion matrices.

mod bootstrap;
mod confusion;
mod mcnemar;
mod wilcoxon;

use std::fmt;

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

pub use bootstrap::{bootstrap_ci, ConfidenceInterval};
pub use confusion::{confusion_matrix, ConfusionMatrix};
pub use mcnemar::{binomial_two_sided, mcnemar, mcnemar_counts, DiscordantCounts, EXACT_THRESHOLD};
pub use wilcoxon::{wilcoxon_signed_rank, MIN_EFFECTIVE_PAIRS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TestMethod {
    #[serde(rename = "mcnemar-exact")]
    McNemarExact,
    #[serde(rename = "mcnemar-chi2")]
    McNemarChi2,
    #[serde(rename = "wilcoxon-normal")]
    WilcoxonNormal,
}

impl TestMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            TestMethod::McNemarExact => "mcnemar-exact",
            TestMethod::McNemarChi2 => "mcnemar-chi2",
            TestMethod::WilcoxonNormal => "wilcoxon-normal",
        }
    }

    /// Test family name as printed in tables.
    pub fn family(self) -> &'static str {
        match self {
            TestMethod::McNemarExact | TestMethod::McNemarChi2 => "McNemar",
            TestMethod::WilcoxonNormal => "Wilcoxon",
        }
    }
}

impl fmt::Display for TestMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
    pub method: TestMethod,
    pub n_effective: usize,
}

/// `ns`, `*`, `**` or `***` at the 0.05 / 0.01 / 0.001 thresholds.
pub fn significance_stars(p: f64) -> &'static str {
    if p < 0.001 {
        "***"
    } else if p < 0.01 {
        "**"
    } else if p < 0.05 {
        "*"
    } else {
        "ns"
    }
}

/// Two-sided tail probability of a standard normal beyond |z|.
pub(crate) fn normal_two_sided(z: f64) -> f64 {
    erfc(z.abs() / std::f64::consts::SQRT_2).min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stars() {
        assert_eq!(significance_stars(0.0005), "***");
        assert_eq!(significance_stars(0.005), "**");
        assert_eq!(significance_stars(0.02), "*");
        assert_eq!(significance_stars(0.05), "ns");
        assert_eq!(significance_stars(0.727), "ns");
    }

    #[test]
    fn normal_tail() {
        let p = normal_two_sided(1.959963984540054);
        assert!((p - 0.05).abs() < 1e-10, "{p:e}");
        assert_eq!(normal_two_sided(0.0), 1.0);
    }
}
