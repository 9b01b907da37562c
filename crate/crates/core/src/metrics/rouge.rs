use crate::metrics::stable_sum;

/// Length of the longest common subsequence (two-row DP).
pub fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y { prev[j] + 1 } else { prev[j + 1].max(cur[j]) };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// ROUGE-L F1 (beta = 1).
pub fn rouge_l<T: PartialEq>(hypothesis: &[T], reference: &[T]) -> f64 {
    let l = lcs_len(hypothesis, reference);
    if l == 0 {
        return 0.0;
    }
    let p = l as f64 / hypothesis.len() as f64;
    let r = l as f64 / reference.len() as f64;
    2.0 * p * r / (p + r)
}

/// Mean ROUGE-L over aligned pairs; 0 for no pairs.
pub fn rouge_l_corpus<T: PartialEq, H: AsRef<[T]>, R: AsRef<[T]>>(hypotheses: &[H], references: &[R]) -> f64 {
    let n = hypotheses.len().min(references.len());
    if n == 0 {
        return 0.0;
    }
    stable_sum(
        hypotheses
            .iter()
            .zip(references)
            .map(|(h, r)| rouge_l(h.as_ref(), r.as_ref())),
    ) / n as f64
}
