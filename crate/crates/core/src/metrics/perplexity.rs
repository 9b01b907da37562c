use crate::error::{Error, Result};
use crate::metrics::stable_sum;

/// `exp(-(sum of all log-probs) / total tokens)`, pooled over records.
pub fn perplexity_from_logprobs<R: AsRef<[f64]>>(records: &[R]) -> Result<f64> {
    if records.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut tokens = 0usize;
    for (i, r) in records.iter().enumerate() {
        if r.as_ref().is_empty() {
            return Err(Error::EmptyRecord(i));
        }
        tokens += r.as_ref().len();
    }
    let total = stable_sum(records.iter().flat_map(|r| r.as_ref().iter().copied()));
    Ok((-total / tokens as f64).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    #[test]
    fn examples() {
        assert_eq!(perplexity_from_logprobs(&[vec![0.0, 0.0]]).unwrap(), 1.0);
        assert!((perplexity_from_logprobs(&[vec![-LN_2, -LN_2]]).unwrap() - 2.0).abs() < 1e-12);
        // (-1 - 2 - 3) / 3 tokens = -2 -> e^2; a per-record mean would differ
        let pooled = perplexity_from_logprobs(&[vec![-1.0], vec![-2.0, -3.0]]).unwrap();
        assert!((pooled - 2.0f64.exp()).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        assert!(matches!(perplexity_from_logprobs(&[vec![-1.0], vec![]]), Err(Error::EmptyRecord(1))));
        assert!(matches!(perplexity_from_logprobs::<Vec<f64>>(&[]), Err(Error::EmptyInput)));
    }
}
