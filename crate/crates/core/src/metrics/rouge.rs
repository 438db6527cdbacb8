use std::collections::HashMap;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct RougeScore {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Lowercases, splits on whitespace and trims non-`[a-z0-9]` characters from
/// both ends of each token. Tokens that end up empty are dropped. No stemming.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|t| {
            t.to_lowercase()
                .trim_matches(|c: char| !(c.is_ascii_lowercase() || c.is_ascii_digit()))
                .to_string()
        })
        .filter(|t| !t.is_empty())
        .collect()
}

/// Length of the longest common subsequence of two token sequences.
///
/// Bit-parallel over the first sequence (Hyyrö's formulation): each bit of
/// `v` tracks one position of `a`, and every token of `b` advances all of them
/// with one multiword add, so the cost is O(|b| * |a| / 64).
pub fn lcs_len<T: AsRef<str>>(a: &[T], b: &[T]) -> usize {
    let m = a.len();
    if m == 0 || b.is_empty() {
        return 0;
    }
    let words = m.div_ceil(64);
    let mut masks: HashMap<&str, Vec<u64>> = HashMap::new();
    for (i, tok) in a.iter().enumerate() {
        masks.entry(tok.as_ref()).or_insert_with(|| vec![0; words])[i / 64] |= 1 << (i % 64);
    }

    let mut v = vec![u64::MAX; words];
    for tok in b {
        let Some(mask) = masks.get(tok.as_ref()) else { continue };
        let mut carry = 0u64;
        for (vw, &mw) in v.iter_mut().zip(mask) {
            let u = *vw & mw;
            let (s1, c1) = vw.overflowing_add(u);
            let (s2, c2) = s1.overflowing_add(carry);
            carry = u64::from(c1 || c2);
            *vw = s2 | (*vw & !mw);
        }
    }

    let tail_bits = m % 64;
    v.iter()
        .enumerate()
        .map(|(w, &vw)| {
            let valid = if w + 1 == words && tail_bits != 0 { (1u64 << tail_bits) - 1 } else { u64::MAX };
            (!vw & valid).count_ones() as usize
        })
        .sum()
}

/// Sentence-level ROUGE-L between a prediction and a reference.
pub fn rouge_l_f1(pred: &str, reference: &str) -> RougeScore {
    let p = tokenize(pred);
    let r = tokenize(reference);
    if p.is_empty() || r.is_empty() {
        return RougeScore::default();
    }
    let lcs = lcs_len(&p, &r) as f64;
    if lcs == 0.0 {
        return RougeScore::default();
    }
    let precision = lcs / p.len() as f64;
    let recall = lcs / r.len() as f64;
    RougeScore {
        precision,
        recall,
        f1: 2.0 * precision * recall / (precision + recall),
    }
}
