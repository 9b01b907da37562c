use std::collections::BTreeMap;

use crate::embeddings::{euclidean, EmbeddingStore};
use crate::error::{Error, Result};
use crate::metrics::transport;
use crate::text::StopwordList;

/// Normalized bag-of-words: distinct in-vocabulary words with mass
/// proportional to their counts, summing to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Nbow {
    pub words: Vec<String>,
    pub weights: Vec<f64>,
}

pub fn nbow<S: AsRef<str>>(doc: &[S], store: &EmbeddingStore, stopwords: &StopwordList) -> Result<Nbow> {
    let kept: Vec<&str> = doc
        .iter()
        .map(AsRef::as_ref)
        .filter(|w| !stopwords.contains(w))
        .collect();
    if kept.is_empty() {
        return Err(Error::EmptyAfterFiltering);
    }
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for w in kept.into_iter().filter(|w| store.contains(w)) {
        *counts.entry(w).or_insert(0) += 1;
    }
    if counts.is_empty() {
        return Err(Error::OovOnly);
    }
    let total: usize = counts.values().sum();
    Ok(Nbow {
        words: counts.keys().map(|w| w.to_string()).collect(),
        weights: counts.values().map(|&c| c as f64 / total as f64).collect(),
    })
}

fn cost_matrix(a: &Nbow, b: &Nbow, store: &EmbeddingStore) -> Vec<f64> {
    let mut cost = Vec::with_capacity(a.words.len() * b.words.len());
    for wa in &a.words {
        let va = store.get(wa).expect("nbow words are in vocabulary");
        for wb in &b.words {
            cost.push(euclidean(va, store.get(wb).expect("nbow words are in vocabulary")));
        }
    }
    cost
}

/// Exact earth mover's distance between two nBOW distributions with
/// Euclidean ground cost.
pub fn wmd_nbow(a: &Nbow, b: &Nbow, store: &EmbeddingStore) -> Result<f64> {
    let plan = transport::solve(&a.weights, &b.weights, &cost_matrix(a, b, store))?;
    Ok(plan.cost.max(0.0))
}

/// Word mover's distance between two token lists. Stopwords are removed and
/// out-of-vocabulary words dropped before building the nBOW weights.
pub fn wmd<S: AsRef<str>>(doc_a: &[S], doc_b: &[S], store: &EmbeddingStore, stopwords: &StopwordList) -> Result<f64> {
    let a = nbow(doc_a, store, stopwords)?;
    let b = nbow(doc_b, store, stopwords)?;
    wmd_nbow(&a, &b, store)
}

/// Relaxed WMD: each side moves all its mass to its nearest word on the other
/// side; the larger of the two one-sided costs is a lower bound on WMD.
pub fn rwmd<S: AsRef<str>>(doc_a: &[S], doc_b: &[S], store: &EmbeddingStore, stopwords: &StopwordList) -> Result<f64> {
    let a = nbow(doc_a, store, stopwords)?;
    let b = nbow(doc_b, store, stopwords)?;
    Ok(rwmd_nbow(&a, &b, store))
}

pub fn rwmd_nbow(a: &Nbow, b: &Nbow, store: &EmbeddingStore) -> f64 {
    let cost = cost_matrix(a, b, store);
    let (m, n) = (a.words.len(), b.words.len());
    let forward: f64 = (0..m)
        .map(|i| a.weights[i] * (0..n).map(|j| cost[i * n + j]).fold(f64::INFINITY, f64::min))
        .sum();
    let backward: f64 = (0..n)
        .map(|j| b.weights[j] * (0..m).map(|i| cost[i * n + j]).fold(f64::INFINITY, f64::min))
        .sum();
    forward.max(backward)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embeddings::toy_embeddings;

    fn no_stopwords() -> StopwordList {
        StopwordList::from_words(Vec::<String>::new())
    }

    #[test]
    fn identity_and_forced_transport() {
        let store = toy_embeddings(1, &["x", "y", "z"], 5).unwrap();
        let sw = no_stopwords();
        assert!(wmd(&["x", "y", "x"], &["x", "y", "x"], &store, &sw).unwrap().abs() < 1e-12);
        let d = wmd(&["x"], &["y"], &store, &sw).unwrap();
        let expected = euclidean(store.get("x").unwrap(), store.get("y").unwrap());
        assert!((d - expected).abs() < 1e-12);
    }

    #[test]
    fn hand_checked_one_dimension() {
        // points 1, 2, 4 on a line: a = {1: 1/2, 2: 1/2}, b = {4: 1}
        // all mass moves to 4: 0.5 * 3 + 0.5 * 2 = 2.5
        let store = EmbeddingStore::from_pairs(1, [("p", vec![1.0]), ("q", vec![2.0]), ("r", vec![4.0])]).unwrap();
        let sw = no_stopwords();
        let d = wmd(&["p", "q"], &["r"], &store, &sw).unwrap();
        assert!((d - 2.5).abs() < 1e-12);
        assert!((rwmd(&["p", "q"], &["r"], &store, &sw).unwrap() - 2.5).abs() < 1e-12);
    }

    #[test]
    fn filtering_errors() {
        let store = toy_embeddings(1, &["x"], 3).unwrap();
        let sw = StopwordList::english();
        assert!(matches!(wmd(&["the", "a"], &["x"], &store, &sw), Err(Error::EmptyAfterFiltering)));
        assert!(matches!(wmd(&["zebra"], &["x"], &store, &sw), Err(Error::OovOnly)));
    }

    #[test]
    fn nbow_weights() {
        let store = toy_embeddings(1, &["p", "q"], 3).unwrap();
        let n = nbow(&["q", "p", "q", "the", "oov"], &store, &StopwordList::english()).unwrap();
        assert_eq!(n.words, ["p", "q"]);
        assert_eq!(n.weights, [1.0 / 3.0, 2.0 / 3.0]);
    }
}
