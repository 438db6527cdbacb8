use super::{normal_two_sided, TestMethod, TestResult};
use crate::error::{Error, Result};

/// Fewer non-zero differences than this make the normal approximation unusable.
pub const MIN_EFFECTIVE_PAIRS: usize = 10;

/// Two-sided Wilcoxon signed-rank test on paired per-sample scores.
///
/// Zero differences are dropped, tied magnitudes share their average rank,
/// and the statistic is `min(W+, W-)` with a tie-corrected variance and no
/// continuity correction.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> Result<TestResult> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { left: a.len(), right: b.len() });
    }
    if a.is_empty() {
        return Err(Error::Empty("paired scores"));
    }
    let mut diffs: Vec<f64> = Vec::with_capacity(a.len());
    for (&x, &y) in a.iter().zip(b) {
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::InvalidInput("non-finite score".into()));
        }
        let d = x - y;
        if d != 0.0 {
            diffs.push(d);
        }
    }
    let n = diffs.len();
    if n < MIN_EFFECTIVE_PAIRS {
        return Err(Error::InsufficientDifferences { found: n, required: MIN_EFFECTIVE_PAIRS });
    }

    diffs.sort_by(|x, y| x.abs().total_cmp(&y.abs()));
    let mut w_plus = 0.0;
    let mut w_minus = 0.0;
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && diffs[j].abs() == diffs[i].abs() {
            j += 1;
        }
        // ranks i+1..=j share their mean
        let rank = (i + 1 + j) as f64 / 2.0;
        for d in &diffs[i..j] {
            if *d > 0.0 {
                w_plus += rank;
            } else {
                w_minus += rank;
            }
        }
        let t = (j - i) as f64;
        tie_term += t * t * t - t;
        i = j;
    }

    let nf = n as f64;
    let statistic = f64::min(w_plus, w_minus);
    let mean = nf * (nf + 1.0) / 4.0;
    let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term / 48.0;
    let p_value = if var > 0.0 {
        normal_two_sided((statistic - mean) / var.sqrt())
    } else {
        1.0
    };
    Ok(TestResult { statistic, p_value, method: TestMethod::WilcoxonNormal, n_effective: n })
}
