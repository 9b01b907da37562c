use std::collections::HashSet;
use std::hash::Hash;

use crate::error::Result;
use crate::text::ngrams;

/// Corpus-level Distinct-n: distinct n-grams over total n-grams, pooled over
/// all sentences (n-grams never span sentence boundaries).
pub fn distinct_n<T: Eq + Hash, S: AsRef<[T]>>(corpus: &[S], n: usize) -> Result<f64> {
    let mut seen: HashSet<&[T]> = HashSet::new();
    let mut total = 0usize;
    for sentence in corpus {
        for gram in ngrams(sentence.as_ref(), n)? {
            seen.insert(gram);
            total += 1;
        }
    }
    if total == 0 {
        return Ok(0.0);
    }
    Ok(seen.len() as f64 / total as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(distinct_n(&[["a", "b", "c"]], 1).unwrap(), 1.0);
        assert_eq!(distinct_n(&[["a", "a", "b"]], 1).unwrap(), 2.0 / 3.0);
        assert_eq!(distinct_n(&[["a", "a", "b"]], 2).unwrap(), 1.0);
        assert_eq!(distinct_n::<&str, Vec<&str>>(&[], 1).unwrap(), 0.0);
        assert!(distinct_n(&[["a"]], 0).is_err());
    }

    #[test]
    fn pools_across_sentences() {
        // unigrams: a b a c -> 3 distinct / 4; bigrams: (a,b) (a,c) -> 2 / 2
        let corpus = [vec!["a", "b"], vec!["a", "c"]];
        assert_eq!(distinct_n(&corpus, 1).unwrap(), 0.75);
        assert_eq!(distinct_n(&corpus, 2).unwrap(), 1.0);
        assert_eq!(distinct_n(&corpus, 3).unwrap(), 0.0);
    }
}
