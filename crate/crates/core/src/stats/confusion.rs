use serde::Serialize;

use crate::error::{Error, Result};

/// Rows are ground-truth labels, columns are predictions plus a trailing
/// "unparsed" column for outputs that did not resolve to any label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConfusionMatrix {
    pub labels: Vec<String>,
    pub counts: Vec<Vec<usize>>,
}

impl ConfusionMatrix {
    pub const UNPARSED: &'static str = "unparsed";

    pub fn get(&self, truth: &str, predicted: &str) -> Option<usize> {
        let r = self.labels.iter().position(|l| l == truth)?;
        let c = if predicted == Self::UNPARSED {
            self.labels.len()
        } else {
            self.labels.iter().position(|l| l == predicted)?
        };
        Some(self.counts[r][c])
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn diagonal(&self) -> usize {
        (0..self.labels.len()).map(|i| self.counts[i][i]).sum()
    }

    pub fn accuracy(&self) -> f64 {
        let total = self.total();
        if total == 0 {
            0.0
        } else {
            self.diagonal() as f64 / total as f64
        }
    }
}

pub fn confusion_matrix<L>(predictions: &[Option<L>], truths: &[L], labels: &[L]) -> Result<ConfusionMatrix>
where
    L: PartialEq + AsRef<str>,
{
    if predictions.len() != truths.len() {
        return Err(Error::LengthMismatch { left: predictions.len(), right: truths.len() });
    }
    let index = |l: &L| labels.iter().position(|x| x == l);
    let k = labels.len();
    let mut counts = vec![vec![0usize; k + 1]; k];
    for (p, t) in predictions.iter().zip(truths) {
        let row = index(t).ok_or_else(|| {
            Error::InvalidInput(format!("ground-truth label `{}` not in label set", t.as_ref()))
        })?;
        let col = p.as_ref().and_then(index).unwrap_or(k);
        counts[row][col] += 1;
    }
    Ok(ConfusionMatrix { labels: labels.iter().map(|l| l.as_ref().to_string()).collect(), counts })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_unparsed_column() {
        let labels = ["entailment", "contradiction", "neutral"];
        let truths = ["entailment", "neutral", "neutral", "contradiction"];
        let preds = [Some("entailment"), Some("entailment"), None, Some("contradiction")];
        let m = confusion_matrix(&preds, &truths, &labels).unwrap();
        assert_eq!(m.get("neutral", "entailment"), Some(1));
        assert_eq!(m.get("neutral", ConfusionMatrix::UNPARSED), Some(1));
        assert_eq!(m.diagonal(), 2);
        assert_eq!(m.total(), 4);
        assert_eq!(m.accuracy(), 0.5);
    }

    #[test]
    fn unknown_truth_label() {
        assert!(confusion_matrix(&[Some("a")], &["z"], &["a"]).is_err());
    }
}
