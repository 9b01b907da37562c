//! Corpus ingestion, cleaning, stratified splitting and statistics.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::io::BufRead;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};
use crate::lexicons::{self, AttributeBags, BagRole};
use crate::text::{self, StopwordList};

/// One blessing text with its occasion and object labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub text: String,
    pub occasion: String,
    pub object: String,
}

impl CorpusRecord {
    pub fn new(text: impl Into<String>, occasion: impl Into<String>, object: impl Into<String>) -> Self {
        Self {
            id: None,
            text: text.into(),
            occasion: occasion.into(),
            object: object.into(),
        }
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = Some(id.into());
        self
    }

    /// The record id, or its 0-based input position when absent.
    pub fn key(&self, index: usize) -> String {
        self.id.clone().unwrap_or_else(|| index.to_string())
    }

    fn validate(&self, line: usize) -> Result<()> {
        if self.occasion.trim().is_empty() || self.object.trim().is_empty() {
            return Err(Error::MalformedLine {
                line,
                reason: "occasion and object labels must be non-empty".into(),
            });
        }
        Ok(())
    }
}

/// Reads JSON Lines, one value per non-blank line.
pub fn read_jsonl<T: DeserializeOwned, R: BufRead>(reader: R) -> Result<Vec<T>> {
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io("<jsonl>", e))?;
        if line.trim().is_empty() {
            continue;
        }
        let value = serde_json::from_str(&line).map_err(|e| Error::MalformedLine {
            line: idx + 1,
            reason: e.to_string(),
        })?;
        out.push(value);
    }
    Ok(out)
}

pub fn read_corpus<R: BufRead>(reader: R) -> Result<Vec<CorpusRecord>> {
    let records: Vec<CorpusRecord> = read_jsonl(reader)?;
    for (i, r) in records.iter().enumerate() {
        r.validate(i + 1)?;
    }
    Ok(records)
}

pub fn load_corpus(path: impl AsRef<Path>) -> Result<Vec<CorpusRecord>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_corpus(std::io::BufReader::new(file))
}

// ---------------------------------------------------------------------------
// cleaning

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectReason {
    Empty,
    Duplicate,
    NonEnglish,
    TooShort,
    TooLong,
    NoAttributeMatch,
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RejectReason::Empty => "empty",
            RejectReason::Duplicate => "duplicate",
            RejectReason::NonEnglish => "non_english",
            RejectReason::TooShort => "too_short",
            RejectReason::TooLong => "too_long",
            RejectReason::NoAttributeMatch => "no_attribute_match",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rejection {
    /// 0-based position in the input.
    pub index: usize,
    pub id: String,
    pub reason: RejectReason,
}

#[derive(Debug, Clone)]
pub struct CleanOptions<'a> {
    pub min_tokens: usize,
    pub max_tokens: usize,
    /// When set, records sharing no word with their occasion or object bag
    /// are dropped.
    pub attribute_bags: Option<&'a AttributeBags>,
}

impl Default for CleanOptions<'_> {
    fn default() -> Self {
        Self {
            min_tokens: 10,
            max_tokens: 200,
            attribute_bags: None,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct CleanOutcome {
    pub kept: Vec<CorpusRecord>,
    pub rejected: Vec<Rejection>,
}

/// Collapses whitespace runs to single spaces and applies NFC.
pub fn normalize_text(text: &str) -> String {
    text.nfc().collect::<String>().split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Runs the cleaning stages in order: normalization, exact deduplication
/// (first occurrence kept, case-insensitive), English filter, token-length
/// filter (inclusive bounds), then the optional attribute-match filter.
pub fn clean_corpus(records: &[CorpusRecord], opts: &CleanOptions) -> CleanOutcome {
    let mut out = CleanOutcome::default();
    let mut seen: HashSet<String> = HashSet::new();
    for (index, record) in records.iter().enumerate() {
        let text = normalize_text(&record.text);
        let reason = if text.is_empty() {
            Some(RejectReason::Empty)
        } else if !seen.insert(text.to_lowercase()) {
            Some(RejectReason::Duplicate)
        } else if !text::is_english(&text) {
            Some(RejectReason::NonEnglish)
        } else {
            let words = text::words(&text);
            if words.len() < opts.min_tokens {
                Some(RejectReason::TooShort)
            } else if words.len() > opts.max_tokens {
                Some(RejectReason::TooLong)
            } else if opts
                .attribute_bags
                .is_some_and(|bags| !matches_attributes(&words, record, bags))
            {
                Some(RejectReason::NoAttributeMatch)
            } else {
                None
            }
        };
        match reason {
            Some(reason) => out.rejected.push(Rejection {
                index,
                id: record.key(index),
                reason,
            }),
            None => out.kept.push(CorpusRecord {
                text,
                ..record.clone()
            }),
        }
    }
    out
}

fn matches_attributes(words: &[String], record: &CorpusRecord, bags: &AttributeBags) -> bool {
    let bags = [
        bags.find(BagRole::Occasion, &record.occasion),
        bags.find(BagRole::Object, &record.object),
    ];
    words
        .iter()
        .any(|w| bags.iter().flatten().any(|bag| bag.contains(w)))
}

// ---------------------------------------------------------------------------
// splitting

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Validation,
    Test,
}

pub const DEFAULT_RATIOS: [f64; 3] = [0.9, 0.05, 0.05];

/// Split per input record, in input order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitAssignment {
    pub assignments: Vec<(String, Split)>,
}

impl SplitAssignment {
    pub fn count(&self, split: Split) -> usize {
        self.assignments.iter().filter(|(_, s)| *s == split).count()
    }
}

/// Largest-remainder apportionment of `n` records over the ratios; remainder
/// ties go to the earlier split. Strata of fewer than 3 records go entirely
/// to train.
pub fn largest_remainder(n: usize, ratios: &[f64; 3]) -> [usize; 3] {
    if n < 3 {
        return [n, 0, 0];
    }
    let quotas: Vec<f64> = ratios.iter().map(|r| r * n as f64).collect();
    let mut counts = [0usize; 3];
    for (c, q) in counts.iter_mut().zip(&quotas) {
        *c = (q + 1e-9).floor() as usize;
    }
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| {
        let ra = quotas[a] - counts[a] as f64;
        let rb = quotas[b] - counts[b] as f64;
        rb.partial_cmp(&ra).expect("finite").then(a.cmp(&b))
    });
    let assigned: usize = counts.iter().sum();
    for &k in order.iter().cycle().take(n.saturating_sub(assigned)) {
        counts[k] += 1;
    }
    counts
}

/// Stratified split by `(occasion, object)`.
///
/// Strata are visited in lexicographic label order; each stratum's records
/// (in input order) are shuffled with one ChaCha8 stream seeded from `seed`,
/// then the first `train` records go to train, the next `validation` to
/// validation, the rest to test.
pub fn stratified_split(records: &[CorpusRecord], ratios: [f64; 3], seed: u64) -> Result<SplitAssignment> {
    if ratios.iter().any(|r| !(*r >= 0.0)) || (ratios.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(Error::BadRatios(ratios));
    }
    let mut strata: BTreeMap<(&str, &str), Vec<usize>> = BTreeMap::new();
    for (i, r) in records.iter().enumerate() {
        strata
            .entry((r.occasion.as_str(), r.object.as_str()))
            .or_default()
            .push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut split = vec![Split::Train; records.len()];
    for members in strata.values_mut() {
        members.shuffle(&mut rng);
        let [train, validation, _] = largest_remainder(members.len(), &ratios);
        for (pos, &idx) in members.iter().enumerate() {
            split[idx] = if pos < train {
                Split::Train
            } else if pos < train + validation {
                Split::Validation
            } else {
                Split::Test
            };
        }
    }
    Ok(SplitAssignment {
        assignments: records
            .iter()
            .enumerate()
            .map(|(i, r)| (r.key(i), split[i]))
            .collect(),
    })
}

// ---------------------------------------------------------------------------
// statistics

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairSize {
    pub occasion: String,
    pub object: String,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusStats {
    pub record_count: usize,
    pub mean_token_length: f64,
    pub occasion_count: usize,
    pub object_count: usize,
    pub pair_count: usize,
    pub per_pair_sizes: Vec<PairSize>,
}

pub fn corpus_stats(records: &[CorpusRecord]) -> CorpusStats {
    let mut pairs: BTreeMap<(&str, &str), usize> = BTreeMap::new();
    let mut occasions = BTreeSet::new();
    let mut objects = BTreeSet::new();
    let mut tokens = 0usize;
    for r in records {
        tokens += text::words(&r.text).len();
        occasions.insert(r.occasion.as_str());
        objects.insert(r.object.as_str());
        *pairs.entry((&r.occasion, &r.object)).or_insert(0) += 1;
    }
    CorpusStats {
        record_count: records.len(),
        mean_token_length: if records.is_empty() {
            0.0
        } else {
            tokens as f64 / records.len() as f64
        },
        occasion_count: occasions.len(),
        object_count: objects.len(),
        pair_count: pairs.len(),
        per_pair_sizes: pairs
            .into_iter()
            .map(|((occasion, object), count)| PairSize {
                occasion: occasion.to_string(),
                object: object.to_string(),
                count,
            })
            .collect(),
    }
}

/// Words of the occasion and object labels used in the corpus
/// (`"Mother's Day"` contributes `mother` and `day`).
pub fn label_vocabulary(records: &[CorpusRecord]) -> HashSet<String> {
    let mut labels = BTreeSet::new();
    for r in records {
        labels.insert(r.occasion.as_str());
        labels.insert(r.object.as_str());
    }
    labels.into_iter().flat_map(text::words).collect()
}

/// Ranked word counts with stopwords and `exclude` removed.
pub fn word_frequencies(
    records: &[CorpusRecord],
    stopwords: &StopwordList,
    exclude: &HashSet<String>,
) -> Vec<(String, usize)> {
    lexicons::word_frequencies(records.iter().map(|r| r.text.as_str()), stopwords, exclude)
}
