//! Per-sentence keyword lists via maximal marginal relevance over word vectors.
//!
//! Candidates are the distinct, in-vocabulary, non-stopword tokens of the
//! sentence. Relevance is the cosine to the document centroid (mean vector of
//! the candidate token occurrences). Selection is greedy:
//!
//! ```text
//! score(c) = lambda * relevance(c) - (1 - lambda) * max_{s in selected} cos(c, s)
//! ```
//!
//! with the redundancy term taken as 0 for the first pick. Ties go to the
//! lexicographically smaller word.

use std::collections::HashMap;

use crate::embeddings::{cosine, EmbeddingStore};
use crate::error::{Error, Result};
use crate::text::{self, StopwordList};

pub const DEFAULT_K: usize = 10;
pub const DEFAULT_MMR_LAMBDA: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct KeywordList {
    pub words: Vec<String>,
    /// Token count of the source sentence.
    pub source_len: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeywordConfig {
    pub k: usize,
    pub mmr_lambda: f64,
}

impl Default for KeywordConfig {
    fn default() -> Self {
        Self {
            k: DEFAULT_K,
            mmr_lambda: DEFAULT_MMR_LAMBDA,
        }
    }
}

impl KeywordConfig {
    pub fn with_k(k: usize) -> Self {
        Self { k, ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidParameter("keyword k must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.mmr_lambda) {
            return Err(Error::InvalidParameter(format!(
                "mmr_lambda must be in [0, 1], got {}",
                self.mmr_lambda
            )));
        }
        Ok(())
    }
}

pub fn extract_keywords(
    text: &str,
    cfg: &KeywordConfig,
    store: &EmbeddingStore,
    stopwords: &StopwordList,
) -> Result<KeywordList> {
    cfg.validate()?;
    let tokens = text::words(text);

    // distinct candidates with their occurrence counts
    let mut occurrences: HashMap<&str, usize> = HashMap::new();
    for word in &tokens {
        if !stopwords.contains(word) && store.contains(word) {
            *occurrences.entry(word.as_str()).or_insert(0) += 1;
        }
    }
    if occurrences.is_empty() {
        return Err(Error::NoCandidates);
    }
    let mut candidates: Vec<(&str, &[f64])> = occurrences
        .keys()
        .map(|w| (*w, store.get(w).expect("filtered on vocabulary")))
        .collect();
    candidates.sort_by(|a, b| a.0.cmp(b.0));

    let total: usize = occurrences.values().sum();
    let mut centroid = vec![0.0; store.dimension()];
    for (word, vector) in &candidates {
        let weight = occurrences[word] as f64 / total as f64;
        for (c, x) in centroid.iter_mut().zip(vector.iter()) {
            *c += weight * x;
        }
    }
    // A zero centroid (vectors cancelling out) carries no relevance signal.
    let relevance: Vec<f64> = candidates
        .iter()
        .map(|(_, v)| cosine(v, &centroid).unwrap_or(0.0))
        .collect();

    let limit = cfg.k.min(candidates.len());
    let mut selected: Vec<usize> = Vec::with_capacity(limit);
    let mut redundancy = vec![f64::NEG_INFINITY; candidates.len()];
    let mut taken = vec![false; candidates.len()];
    while selected.len() < limit {
        let mut best: Option<(usize, f64)> = None;
        for i in (0..candidates.len()).filter(|&i| !taken[i]) {
            let penalty = if selected.is_empty() { 0.0 } else { redundancy[i] };
            let score = cfg.mmr_lambda * relevance[i] - (1.0 - cfg.mmr_lambda) * penalty;
            // candidates are sorted, so strict > keeps the smaller word on ties
            if best.is_none_or(|(_, s)| score > s) {
                best = Some((i, score));
            }
        }
        let (pick, _) = best.expect("limit <= candidate count");
        taken[pick] = true;
        selected.push(pick);
        for i in (0..candidates.len()).filter(|&i| !taken[i]) {
            let sim = cosine(candidates[i].1, candidates[pick].1).expect("stored vectors are nonzero");
            redundancy[i] = redundancy[i].max(sim);
        }
    }

    Ok(KeywordList {
        words: selected.into_iter().map(|i| candidates[i].0.to_string()).collect(),
        source_len: tokens.len(),
    })
}
