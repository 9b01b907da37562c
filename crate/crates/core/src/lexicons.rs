//! Blessing and attribute bags-of-words.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::path::Path;

use serde::de::{MapAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::pipeline::CorpusRecord;
use crate::text::{self, StopwordList};

const SHIPPED_ATTRIBUTE_BAGS: &str = include_str!("../../../data/attribute_bags.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BagRole {
    Blessing,
    Occasion,
    Object,
}

/// A named, ordered, deduplicated set of lowercase words.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BagOfWords {
    pub name: String,
    pub role: BagRole,
    words: Vec<String>,
    #[serde(skip)]
    members: HashSet<String>,
}

impl BagOfWords {
    /// Builds a bag; each entry is run through the tokenizer, so `"Christmas"`
    /// becomes `christmas` and a multi-word entry contributes each of its words.
    pub fn new<I, S>(name: impl Into<String>, role: BagRole, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let name = name.into();
        let mut words = Vec::new();
        let mut members = HashSet::new();
        for entry in entries {
            for word in text::words(entry.as_ref()) {
                if members.insert(word.clone()) {
                    words.push(word);
                }
            }
        }
        if words.is_empty() {
            return Err(Error::EmptyBag(name));
        }
        Ok(Self {
            name,
            role,
            words,
            members,
        })
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn contains(&self, word: &str) -> bool {
        self.members.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("bag serializes")
    }

    pub fn from_json(raw: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Raw {
            name: String,
            role: BagRole,
            words: Vec<String>,
        }
        let raw: Raw = serde_json::from_str(raw)?;
        Self::new(raw.name, raw.role, raw.words)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let raw = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&raw)
    }
}

/// Token frequencies over a corpus, skipping stopwords and `exclude`.
/// Sorted by descending count, then lexicographically.
pub fn word_frequencies<'a, I>(texts: I, stopwords: &StopwordList, exclude: &HashSet<String>) -> Vec<(String, usize)>
where
    I: IntoIterator<Item = &'a str>,
{
    let mut counts: HashMap<String, usize> = HashMap::new();
    for text in texts {
        for word in text::words(text) {
            if stopwords.contains(&word) || exclude.contains(&word) {
                continue;
            }
            *counts.entry(word).or_insert(0) += 1;
        }
    }
    let mut ranked: Vec<(String, usize)> = counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked
}

/// The `size` most frequent non-stopword tokens of the corpus.
pub fn build_blessing_bag(corpus: &[CorpusRecord], size: usize, stopwords: &StopwordList) -> Result<BagOfWords> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    if size == 0 {
        return Err(Error::InvalidParameter("bag size must be >= 1".into()));
    }
    let ranked = word_frequencies(corpus.iter().map(|r| r.text.as_str()), stopwords, &HashSet::new());
    BagOfWords::new(
        "blessing",
        BagRole::Blessing,
        ranked.into_iter().take(size).map(|(w, _)| w),
    )
}

/// Occasion and object bags keyed by attribute label.
#[derive(Debug, Clone)]
pub struct AttributeBags {
    occasions: BTreeMap<String, BagOfWords>,
    objects: BTreeMap<String, BagOfWords>,
}

impl AttributeBags {
    /// Bags transcribed from the published occasion/object word tables.
    pub fn shipped() -> Self {
        Self::parse(SHIPPED_ATTRIBUTE_BAGS).expect("shipped attribute bags are well formed")
    }

    pub fn parse(raw: &str) -> Result<Self> {
        let file: BagFile = serde_json::from_str(raw).map_err(|e| Error::MalformedFile(e.to_string()))?;
        let mut seen = HashSet::new();
        let mut build = |entries: Vec<(String, Vec<String>)>, role| -> Result<BTreeMap<String, BagOfWords>> {
            let mut out = BTreeMap::new();
            for (name, words) in entries {
                if !seen.insert(name.clone()) {
                    return Err(Error::DuplicateBagName(name));
                }
                let bag = BagOfWords::new(name.clone(), role, &words)
                    .map_err(|_| Error::MalformedFile(format!("bag {name:?} has no words")))?;
                out.insert(name, bag);
            }
            Ok(out)
        };
        let occasions = build(file.occasions.0, BagRole::Occasion)?;
        let objects = build(file.objects.0, BagRole::Object)?;
        Ok(Self { occasions, objects })
    }

    pub fn get(&self, name: &str) -> Option<&BagOfWords> {
        self.occasions.get(name).or_else(|| self.objects.get(name))
    }

    /// Looks up a bag for a corpus label. Falls back to a case-insensitive
    /// match that also tolerates a trailing plural `s` on either side
    /// (`Grandparent` finds `Grandparents`).
    pub fn find(&self, role: BagRole, label: &str) -> Option<&BagOfWords> {
        let map = match role {
            BagRole::Occasion => &self.occasions,
            BagRole::Object => &self.objects,
            BagRole::Blessing => return None,
        };
        if let Some(bag) = map.get(label) {
            return Some(bag);
        }
        let key = fold_label(label);
        map.iter().find(|(name, _)| fold_label(name) == key).map(|(_, bag)| bag)
    }

    pub fn occasions(&self) -> impl Iterator<Item = &BagOfWords> {
        self.occasions.values()
    }

    pub fn objects(&self) -> impl Iterator<Item = &BagOfWords> {
        self.objects.values()
    }

    pub fn iter(&self) -> impl Iterator<Item = &BagOfWords> {
        self.occasions().chain(self.objects())
    }

    pub fn len(&self) -> usize {
        self.occasions.len() + self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Union of all bag words.
    pub fn vocabulary(&self) -> HashSet<String> {
        self.iter().flat_map(|b| b.words().iter().cloned()).collect()
    }
}

fn fold_label(label: &str) -> String {
    let lower = label.trim().to_lowercase();
    lower.strip_suffix('s').map(str::to_string).unwrap_or(lower)
}

pub fn load_attribute_bags(path: impl AsRef<Path>) -> Result<AttributeBags> {
    let path = path.as_ref();
    let raw = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    AttributeBags::parse(&raw)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BagFile {
    occasions: OrderedEntries,
    objects: OrderedEntries,
}

/// JSON object read as an ordered list so duplicate keys survive parsing.
struct OrderedEntries(Vec<(String, Vec<String>)>);

impl<'de> Deserialize<'de> for OrderedEntries {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct EntriesVisitor;

        impl<'de> Visitor<'de> for EntriesVisitor {
            type Value = OrderedEntries;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an object mapping bag names to word lists")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Self::Value, A::Error> {
                let mut entries = Vec::new();
                while let Some(entry) = map.next_entry::<String, Vec<String>>()? {
                    entries.push(entry);
                }
                Ok(OrderedEntries(entries))
            }
        }

        deserializer.deserialize_map(EntriesVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(text: &str) -> CorpusRecord {
        CorpusRecord::new(text, "Birthday", "Friend")
    }

    #[test]
    fn blessing_bag_examples() {
        let corpus = vec![record("wish you love"); 3];
        let sw = StopwordList::from_words(["you"]);
        let bag = build_blessing_bag(&corpus, 50, &sw).unwrap();
        assert_eq!(bag.words(), ["love", "wish"]);

        let bag = build_blessing_bag(&[record("happy happy day")], 1, &sw).unwrap();
        assert_eq!(bag.words(), ["happy"]);

        assert!(matches!(build_blessing_bag(&[], 5, &sw), Err(Error::EmptyCorpus)));
    }

    #[test]
    fn blessing_bag_orders_by_frequency_then_word() {
        let corpus = vec![record("b a c c"), record("a d")];
        let bag = build_blessing_bag(&corpus, 3, &StopwordList::from_words(["x"])).unwrap();
        assert_eq!(bag.words(), ["a", "c", "b"]);
    }

    #[test]
    fn shipped_bags() {
        let bags = AttributeBags::shipped();
        assert_eq!(bags.occasions().count(), 23);
        assert_eq!(bags.objects().count(), 33);
        let christmas = bags.get("Christmas").unwrap();
        for w in ["christmas", "merry", "santa", "humming", "xmas"] {
            assert!(christmas.contains(w), "{w}");
        }
        let boss = bags.get("Boss").unwrap();
        for w in ["boss", "office", "workshop"] {
            assert!(boss.contains(w), "{w}");
        }
        assert!(bags.get("Mars Day").is_none());
        assert!(bags.iter().all(|b| !b.is_empty()));
        // "forever" is listed twice in the Girlfriend row
        let gf = bags.get("Girlfriend").unwrap();
        assert_eq!(gf.words().iter().filter(|w| *w == "forever").count(), 1);
    }

    #[test]
    fn label_lookup_folds_case_and_plural() {
        let bags = AttributeBags::shipped();
        assert_eq!(bags.find(BagRole::Object, "Grandparent").unwrap().name, "Grandparents");
        assert_eq!(bags.find(BagRole::Occasion, "christmas").unwrap().name, "Christmas");
        assert!(bags.find(BagRole::Object, "Christmas").is_none());
        assert!(bags.find(BagRole::Object, "General").is_none());
    }

    #[test]
    fn attribute_file_errors() {
        let dup = r#"{"occasions": {"A": ["x"], "A": ["y"]}, "objects": {}}"#;
        assert!(matches!(AttributeBags::parse(dup), Err(Error::DuplicateBagName(n)) if n == "A"));
        let cross = r#"{"occasions": {"A": ["x"]}, "objects": {"A": ["y"]}}"#;
        assert!(matches!(AttributeBags::parse(cross), Err(Error::DuplicateBagName(_))));
        let empty = r#"{"occasions": {"A": []}, "objects": {}}"#;
        assert!(matches!(AttributeBags::parse(empty), Err(Error::MalformedFile(_))));
        assert!(matches!(AttributeBags::parse("[1, 2]"), Err(Error::MalformedFile(_))));
        assert!(matches!(AttributeBags::parse(r#"{"occasions": {}}"#), Err(Error::MalformedFile(_))));
    }

    #[test]
    fn blessing_bag_json_round_trip() {
        let bag = BagOfWords::new("blessing", BagRole::Blessing, ["love", "wish"]).unwrap();
        assert_eq!(BagOfWords::from_json(&bag.to_json()).unwrap(), bag);
    }

    #[test]
    fn word_frequency_examples() {
        let sw = StopwordList::from_words(["the"]);
        let none = HashSet::new();
        assert_eq!(
            word_frequencies(["love love wish"], &sw, &none),
            vec![("love".to_string(), 2), ("wish".to_string(), 1)]
        );
        let exclude: HashSet<String> = ["love".to_string()].into();
        assert_eq!(word_frequencies(["love love wish"], &sw, &exclude), vec![("wish".to_string(), 1)]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn blessing_bag_is_permutation_invariant(
                texts in prop::collection::vec("[a-e ]{1,12}", 1..8),
                k in 1usize..6,
            ) {
                prop_assume!(texts.iter().any(|t| !t.trim().is_empty()));
                let sw = StopwordList::from_words(["e"]);
                let corpus: Vec<CorpusRecord> = texts.iter().map(|t| record(t)).collect();
                let mut reversed = corpus.clone();
                reversed.reverse();
                let a = build_blessing_bag(&corpus, k, &sw);
                let b = build_blessing_bag(&reversed, k, &sw);
                let distinct: HashSet<String> = texts.iter().flat_map(|t| text::words(t)).filter(|w| w != "e").collect();
                match (a, b) {
                    (Ok(a), Ok(b)) => {
                        prop_assert_eq!(a.words(), b.words());
                        prop_assert_eq!(a.len(), k.min(distinct.len()));
                    }
                    (Err(Error::EmptyBag(_)), Err(Error::EmptyBag(_))) => prop_assert!(distinct.is_empty()),
                    other => prop_assert!(false, "unexpected {:?}", other),
                }
            }
        }
    }
}
