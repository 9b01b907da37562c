use crate::embeddings::{bag_similarity, EmbeddingStore};
use crate::error::{Error, Result};
use crate::lexicons::BagOfWords;
use crate::text::{segment_clauses, StopwordList};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntConfig {
    /// Similarity a token must exceed to count as attribute-related.
    pub threshold_t: f64,
    /// Bonus per role alternation beyond the first.
    pub bonus_unit: f64,
    pub filter_stopwords: bool,
}

impl Default for EntConfig {
    fn default() -> Self {
        Self {
            threshold_t: 0.4,
            bonus_unit: 0.5,
            filter_stopwords: true,
        }
    }
}

impl EntConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.threshold_t > 0.0 && self.threshold_t < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "threshold_t must be in (0, 1), got {}",
                self.threshold_t
            )));
        }
        if !(self.bonus_unit >= 0.0 && self.bonus_unit.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "bonus_unit must be >= 0, got {}",
                self.bonus_unit
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Occasion,
    Object,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntBreakdown {
    pub clauses: usize,
    /// Clauses holding both an occasion- and an object-related token.
    pub indicator: usize,
    /// Role sequence used for alternation counting, in sentence order.
    pub roles: Vec<Role>,
    pub alternations: usize,
    pub bonus: f64,
    pub score: f64,
}

/// Entanglement score of a single sentence. See [`ent_breakdown`].
pub fn ent_score(
    text: &str,
    occasion: &BagOfWords,
    object: &BagOfWords,
    store: &EmbeddingStore,
    stopwords: &StopwordList,
    cfg: &EntConfig,
) -> Result<f64> {
    ent_breakdown(text, occasion, object, store, stopwords, cfg).map(|b| b.score)
}

/// Clause indicator count plus alternation bonus.
///
/// A token is occasion-related when its bag similarity exceeds `t`, likewise
/// for objects; one token may be both. Each clause with at least one of each
/// adds 1. For alternations every related token takes the role of its higher
/// similarity; a token whose two similarities tie is ambiguous and skipped.
/// With `A` role changes in the resulting sequence the bonus is
/// `bonus_unit * max(0, A - 1)`.
pub fn ent_breakdown(
    text: &str,
    occasion: &BagOfWords,
    object: &BagOfWords,
    store: &EmbeddingStore,
    stopwords: &StopwordList,
    cfg: &EntConfig,
) -> Result<EntBreakdown> {
    cfg.validate()?;
    for bag in [occasion, object] {
        if bag.is_empty() {
            return Err(Error::EmptyBag(bag.name.clone()));
        }
    }
    let t = cfg.threshold_t;
    let clauses = segment_clauses(text);
    let mut indicator = 0;
    let mut roles = Vec::new();
    for clause in &clauses {
        let (mut has_occasion, mut has_object) = (false, false);
        for word in clause.words() {
            if cfg.filter_stopwords && stopwords.contains(word) {
                continue;
            }
            let s_occ = bag_similarity(word, occasion, store)?;
            let s_obj = bag_similarity(word, object, store)?;
            let (is_occ, is_obj) = (s_occ > t, s_obj > t);
            has_occasion |= is_occ;
            has_object |= is_obj;
            if (is_occ || is_obj) && s_occ != s_obj {
                roles.push(if s_occ > s_obj { Role::Occasion } else { Role::Object });
            }
        }
        indicator += usize::from(has_occasion && has_object);
    }
    let alternations = roles.windows(2).filter(|w| w[0] != w[1]).count();
    let bonus = cfg.bonus_unit * alternations.saturating_sub(1) as f64;
    Ok(EntBreakdown {
        clauses: clauses.len(),
        indicator,
        roles,
        alternations,
        bonus,
        score: indicator as f64 + bonus,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embeddings::toy_embeddings;
    use crate::lexicons::{AttributeBags, BagRole};
    use proptest::prelude::*;

    const SANTA: &str = "Merry Christmas to a boss who keeps the office humming along like Santa's Workshop!";

    fn exact_only() -> EmbeddingStore {
        EmbeddingStore::empty(1).unwrap()
    }

    #[test]
    fn santa_workshop_trace() {
        let bags = AttributeBags::shipped();
        let b = ent_breakdown(
            SANTA,
            bags.get("Christmas").unwrap(),
            bags.get("Boss").unwrap(),
            &exact_only(),
            &StopwordList::english(),
            &EntConfig::default(),
        )
        .unwrap();
        use Role::*;
        assert_eq!(b.clauses, 1);
        assert_eq!(b.indicator, 1);
        assert_eq!(b.roles, [Occasion, Occasion, Object, Object, Occasion, Occasion, Object]);
        assert_eq!(b.alternations, 3);
        assert_eq!(b.bonus, 1.0);
        assert_eq!(b.score, 2.0);
    }

    #[test]
    fn nothing_related() {
        let bags = AttributeBags::shipped();
        let s = ent_score(
            "The weather report for Tuesday.",
            bags.get("Christmas").unwrap(),
            bags.get("Boss").unwrap(),
            &exact_only(),
            &StopwordList::english(),
            &EntConfig::default(),
        )
        .unwrap();
        assert_eq!(s, 0.0);
    }

    #[test]
    fn occasion_only_clause() {
        let bags = AttributeBags::shipped();
        let b = ent_breakdown(
            "Merry Christmas and a snowy eve",
            bags.get("Christmas").unwrap(),
            bags.get("Boss").unwrap(),
            &exact_only(),
            &StopwordList::english(),
            &EntConfig::default(),
        )
        .unwrap();
        assert_eq!(b.indicator, 0);
        assert_eq!(b.alternations, 0);
        assert_eq!(b.score, 0.0);
    }

    #[test]
    fn shared_word_counts_for_indicator_not_alternation() {
        let occ = BagOfWords::new("occ", BagRole::Occasion, ["work", "merry"]).unwrap();
        let obj = BagOfWords::new("obj", BagRole::Object, ["work", "boss"]).unwrap();
        let b = ent_breakdown("hard work", &occ, &obj, &exact_only(), &StopwordList::english(), &EntConfig::default())
            .unwrap();
        assert_eq!(b.indicator, 1);
        assert!(b.roles.is_empty());
        assert_eq!(b.score, 1.0);
    }

    #[test]
    fn stopword_filter_toggle() {
        let occ = BagOfWords::new("occ", BagRole::Occasion, ["the"]).unwrap();
        let obj = BagOfWords::new("obj", BagRole::Object, ["boss"]).unwrap();
        let sw = StopwordList::english();
        let on = EntConfig::default();
        let off = EntConfig {
            filter_stopwords: false,
            ..on
        };
        assert_eq!(ent_score("the boss", &occ, &obj, &exact_only(), &sw, &on).unwrap(), 0.0);
        assert_eq!(ent_score("the boss", &occ, &obj, &exact_only(), &sw, &off).unwrap(), 1.0);
    }

    #[test]
    fn config_validation() {
        let bags = AttributeBags::shipped();
        let (occ, obj) = (bags.get("Christmas").unwrap(), bags.get("Boss").unwrap());
        for cfg in [
            EntConfig { threshold_t: 0.0, ..Default::default() },
            EntConfig { threshold_t: 1.0, ..Default::default() },
            EntConfig { bonus_unit: -0.1, ..Default::default() },
        ] {
            let err = ent_score(SANTA, occ, obj, &exact_only(), &StopwordList::english(), &cfg).unwrap_err();
            assert!(matches!(err, Error::InvalidParameter(_)));
        }
    }

    fn sentence(words: &[usize], vocab: &[String], commas: &[bool]) -> String {
        let mut out = String::new();
        for (i, &w) in words.iter().enumerate() {
            out.push_str(&vocab[w]);
            out.push_str(if commas[i % commas.len()] { ", " } else { " " });
        }
        out
    }

    proptest! {
        #[test]
        fn ent_invariants(
            seed in 0u64..500,
            words in prop::collection::vec(0usize..16, 1..20),
            commas in prop::collection::vec(any::<bool>(), 1..5),
            t1 in 0.05f64..0.95,
            t2 in 0.05f64..0.95,
        ) {
            let vocab: Vec<String> = (0..16).map(|i| format!("w{i}")).collect();
            let store = toy_embeddings(seed, &vocab, 3).unwrap();
            let occ = BagOfWords::new("occ", BagRole::Occasion, &vocab[0..3]).unwrap();
            let obj = BagOfWords::new("obj", BagRole::Object, &vocab[2..5]).unwrap();
            let text = sentence(&words, &vocab, &commas);
            let sw = StopwordList::english();
            let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
            let cfg_lo = EntConfig { threshold_t: lo, ..Default::default() };
            let cfg_hi = EntConfig { threshold_t: hi, ..Default::default() };
            let a = ent_breakdown(&text, &occ, &obj, &store, &sw, &cfg_lo).unwrap();
            let b = ent_breakdown(&text, &occ, &obj, &store, &sw, &cfg_hi).unwrap();
            prop_assert!(a.score >= 0.0);
            prop_assert!(a.indicator <= a.clauses);
            if a.alternations <= 1 {
                prop_assert_eq!(a.score, a.indicator as f64);
            }
            prop_assert!(b.score <= a.score, "t {} -> {}, score {} -> {}", lo, hi, a.score, b.score);
            let swapped = ent_score(&text, &obj, &occ, &store, &sw, &cfg_lo).unwrap();
            prop_assert_eq!(swapped, a.score);
        }
    }
}
