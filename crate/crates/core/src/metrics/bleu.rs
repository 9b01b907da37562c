use std::collections::HashMap;
use std::hash::Hash;

use crate::error::{Error, Result};
use crate::text::ngram_counts;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BleuConfig {
    pub max_n: usize,
    /// Add-one smoothing of precisions for orders >= 2.
    pub smoothing: bool,
}

impl Default for BleuConfig {
    fn default() -> Self {
        Self {
            max_n: 4,
            smoothing: false,
        }
    }
}

#[derive(Debug, Default, Clone)]
struct Stats {
    matches: Vec<usize>,
    totals: Vec<usize>,
    hyp_len: usize,
    ref_len: usize,
}

impl Stats {
    fn new(max_n: usize) -> Self {
        Self {
            matches: vec![0; max_n],
            totals: vec![0; max_n],
            ..Default::default()
        }
    }

    fn add<T: Eq + Hash>(&mut self, hyp: &[T], reference: &[T]) {
        self.hyp_len += hyp.len();
        self.ref_len += reference.len();
        for n in 1..=self.matches.len() {
            let h = ngram_counts(hyp, n).expect("n >= 1");
            let r: HashMap<&[T], usize> = ngram_counts(reference, n).expect("n >= 1");
            self.totals[n - 1] += h.values().sum::<usize>();
            self.matches[n - 1] += h
                .iter()
                .map(|(gram, &c)| c.min(r.get(gram).copied().unwrap_or(0)))
                .sum::<usize>();
        }
    }

    /// Geometric mean of clipped precisions times the brevity penalty.
    ///
    /// Orders for which the hypotheses contain no n-grams at all (every
    /// hypothesis shorter than n) are left out of the mean.
    fn score(&self, smoothing: bool) -> f64 {
        if self.hyp_len == 0 {
            return 0.0;
        }
        let mut log_sum = 0.0;
        let mut orders = 0;
        for (idx, (&m, &t)) in self.matches.iter().zip(&self.totals).enumerate() {
            if t == 0 {
                continue;
            }
            let (m, t) = if smoothing && idx >= 1 {
                (m as f64 + 1.0, t as f64 + 1.0)
            } else {
                (m as f64, t as f64)
            };
            if m == 0.0 {
                return 0.0;
            }
            log_sum += (m / t).ln();
            orders += 1;
        }
        let (c, r) = (self.hyp_len as f64, self.ref_len as f64);
        let bp = if c > r { 1.0 } else { (1.0 - r / c).exp() };
        bp * (log_sum / orders as f64).exp()
    }
}

fn validate(cfg: &BleuConfig) -> Result<()> {
    if cfg.max_n == 0 {
        return Err(Error::InvalidParameter("bleu max_n must be >= 1".into()));
    }
    Ok(())
}

/// Corpus BLEU: n-gram matches and lengths are pooled over all pairs before
/// the precisions and brevity penalty are formed.
pub fn bleu<T: Eq + Hash, H: AsRef<[T]>, R: AsRef<[T]>>(
    hypotheses: &[H],
    references: &[R],
    cfg: &BleuConfig,
) -> Result<f64> {
    validate(cfg)?;
    if hypotheses.len() != references.len() {
        return Err(Error::LengthMismatch {
            hypotheses: hypotheses.len(),
            references: references.len(),
        });
    }
    if hypotheses.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut stats = Stats::new(cfg.max_n);
    for (h, r) in hypotheses.iter().zip(references) {
        stats.add(h.as_ref(), r.as_ref());
    }
    Ok(stats.score(cfg.smoothing))
}

/// BLEU of a single pair.
pub fn sentence_bleu<T: Eq + Hash>(hypothesis: &[T], reference: &[T], cfg: &BleuConfig) -> Result<f64> {
    validate(cfg)?;
    let mut stats = Stats::new(cfg.max_n);
    stats.add(hypothesis, reference);
    Ok(stats.score(cfg.smoothing))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<&str> {
        s.split_whitespace().collect()
    }

    #[test]
    fn identity_is_one() {
        for s in ["a", "a b", "the cat sat on the mat", "x y z w v"] {
            let t = toks(s);
            assert_eq!(bleu(&[t.clone()], &[t.clone()], &BleuConfig::default()).unwrap(), 1.0);
            assert_eq!(sentence_bleu(&t, &t, &BleuConfig::default()).unwrap(), 1.0);
        }
    }

    #[test]
    fn zero_order_precision() {
        let h = [toks("the the the the")];
        let r = [toks("the cat sat")];
        assert_eq!(bleu(&h, &r, &BleuConfig::default()).unwrap(), 0.0);
    }

    #[test]
    fn errors() {
        let h = [toks("a")];
        let r: [Vec<&str>; 0] = [];
        assert!(matches!(bleu(&h, &r, &BleuConfig::default()), Err(Error::LengthMismatch { .. })));
        let e: [Vec<&str>; 0] = [];
        assert!(matches!(bleu(&e, &e, &BleuConfig::default()), Err(Error::EmptyInput)));
        let cfg = BleuConfig { max_n: 0, smoothing: false };
        assert!(matches!(bleu(&h, &h, &cfg), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn empty_hypothesis_scores_zero() {
        let h: [Vec<&str>; 1] = [vec![]];
        assert_eq!(bleu(&h, &[toks("a b")], &BleuConfig::default()).unwrap(), 0.0);
    }
}
