use crate::embeddings::{bag_similarity, EmbeddingStore};
use crate::error::Result;
use crate::keywords::{extract_keywords, KeywordConfig};
use crate::lexicons::BagOfWords;
use crate::text::StopwordList;

/// Blessing score: mean over the sentence's keywords of the best cosine
/// match in the blessing bag.
pub fn ble_score(
    text: &str,
    bag: &BagOfWords,
    store: &EmbeddingStore,
    stopwords: &StopwordList,
    keywords: &KeywordConfig,
) -> Result<f64> {
    let list = extract_keywords(text, keywords, store, stopwords)?;
    let mut total = 0.0;
    for word in &list.words {
        total += bag_similarity(word, bag, store)?;
    }
    Ok(total / list.words.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::lexicons::BagRole;

    fn store() -> EmbeddingStore {
        EmbeddingStore::from_pairs(
            2,
            [
                ("joy", vec![1.0, 0.0]),
                ("happy", vec![0.8, 0.6]),
                ("car", vec![0.0, 1.0]),
            ],
        )
        .unwrap()
    }

    fn bag(words: &[&str]) -> BagOfWords {
        BagOfWords::new("blessing", BagRole::Blessing, words.iter().copied()).unwrap()
    }

    #[test]
    fn exact_match_identity() {
        let s = ble_score("happy", &bag(&["happy"]), &store(), &StopwordList::english(), &KeywordConfig::default());
        assert_eq!(s.unwrap(), 1.0);
    }

    #[test]
    fn hand_evaluated_average() {
        // K = {joy, car}: (cos(joy, happy) + cos(car, happy)) / 2 = (0.8 + 0.6) / 2
        let s = ble_score("joy car", &bag(&["happy"]), &store(), &StopwordList::english(), &KeywordConfig::default())
            .unwrap();
        assert!((s - 0.7).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_keyword() {
        let store = EmbeddingStore::from_pairs(2, [("car", vec![0.0, 1.0]), ("joy", vec![1.0, 0.0])]).unwrap();
        let s = ble_score("car", &bag(&["joy"]), &store, &StopwordList::english(), &KeywordConfig::default()).unwrap();
        assert_eq!(s, 0.0);
    }

    #[test]
    fn no_keywords_propagates() {
        let err = ble_score("the a an", &bag(&["joy"]), &store(), &StopwordList::english(), &KeywordConfig::default())
            .unwrap_err();
        assert!(matches!(err, Error::NoCandidates));
    }
}
