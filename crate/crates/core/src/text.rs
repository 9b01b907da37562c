//! Tokenization, clause segmentation, n-grams and the stopword list.
//!
//! Every downstream metric sees text only through [`tokenize`] and
//! [`segment_clauses`], so the normalization rules here define what a
//! "word" is across the whole crate:
//!
//! 1. NFC normalization, typographic apostrophes mapped to `'`, lowercasing.
//! 2. Split on any character outside `[a-z0-9']`.
//! 3. Strip possessive `'s` and surrounding apostrophes (`santa's` -> `santa`).
//! 4. Drop empty fragments.

use std::collections::{HashMap, HashSet};
use std::hash::Hash;
use std::ops::Range;
use std::path::Path;

use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};

/// Characters that end a clause.
pub const CLAUSE_DELIMITERS: [char; 6] = [',', ';', ':', '.', '!', '?'];

const SHIPPED_STOPWORDS: &str = include_str!("../../../data/stopwords.txt");

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Token {
    pub surface: String,
    /// 0-based index within the sentence.
    pub position: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause {
    pub tokens: Vec<Token>,
    /// Byte range of the clause in the NFC-normalized sentence.
    pub span: Range<usize>,
}

impl Clause {
    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(|t| t.surface.as_str())
    }
}

fn normalize(text: &str) -> String {
    text.nfc()
        .map(|c| match c {
            '\u{2019}' | '\u{2018}' | '\u{02BC}' | '\u{2032}' | '\u{FF07}' => '\'',
            c => c,
        })
        .collect()
}

fn clean_fragment(fragment: &str) -> Option<String> {
    let mut word = fragment;
    loop {
        let before = word.len();
        word = word.trim_matches('\'');
        if let Some(stem) = word.strip_suffix("'s") {
            word = stem;
        }
        if word.len() == before {
            break;
        }
    }
    (!word.is_empty()).then(|| word.to_string())
}

fn is_word_char(c: char) -> bool {
    c.is_ascii_lowercase() || c.is_ascii_digit() || c == '\''
}

fn words_of_normalized(normalized: &str) -> Vec<String> {
    normalized
        .to_lowercase()
        .split(|c: char| !is_word_char(c))
        .filter_map(clean_fragment)
        .collect()
}

/// Tokenizes `text` into lowercase word tokens in reading order.
pub fn tokenize(text: &str) -> Vec<Token> {
    words(text)
        .into_iter()
        .enumerate()
        .map(|(position, surface)| Token { surface, position })
        .collect()
}

/// Same as [`tokenize`] but returns only the surfaces.
pub fn words(text: &str) -> Vec<String> {
    words_of_normalized(&normalize(text))
}

/// Splits a sentence into punctuation-delimited clauses.
///
/// Clauses without tokens are dropped, so `"..."` yields nothing. Token
/// positions continue across clauses, which makes the concatenated clause
/// tokens identical to `tokenize(text)`.
pub fn segment_clauses(text: &str) -> Vec<Clause> {
    let normalized = normalize(text);
    let mut clauses = Vec::new();
    let mut position = 0;
    let mut start = 0;
    let mut push = |span: Range<usize>, clauses: &mut Vec<Clause>| {
        let tokens: Vec<Token> = words_of_normalized(&normalized[span.clone()])
            .into_iter()
            .map(|surface| {
                let token = Token { surface, position };
                position += 1;
                token
            })
            .collect();
        if !tokens.is_empty() {
            clauses.push(Clause { tokens, span });
        }
    };
    for (idx, c) in normalized.char_indices() {
        if CLAUSE_DELIMITERS.contains(&c) {
            push(start..idx, &mut clauses);
            start = idx + c.len_utf8();
        }
    }
    push(start..normalized.len(), &mut clauses);
    clauses
}

/// All contiguous `n`-token windows of `tokens`, in order, with multiplicity.
pub fn ngrams<T>(tokens: &[T], n: usize) -> Result<Vec<&[T]>> {
    if n == 0 {
        return Err(Error::InvalidParameter("n-gram order must be >= 1".into()));
    }
    Ok(tokens.windows(n).collect())
}

/// Multiset view of [`ngrams`].
pub fn ngram_counts<T: Eq + Hash>(tokens: &[T], n: usize) -> Result<HashMap<&[T], usize>> {
    let mut counts = HashMap::new();
    for gram in ngrams(tokens, n)? {
        *counts.entry(gram).or_insert(0) += 1;
    }
    Ok(counts)
}

/// Character-class language heuristic: at least one token, and at least 95%
/// of alphabetic characters are ASCII letters.
pub fn is_english(text: &str) -> bool {
    if words(text).is_empty() {
        return false;
    }
    let (ascii, total) = text
        .chars()
        .filter(|c| c.is_alphabetic())
        .fold((0usize, 0usize), |(a, t), c| {
            (a + usize::from(c.is_ascii_alphabetic()), t + 1)
        });
    // 20 * ascii >= 19 * total  <=>  ascii / total >= 0.95, without rounding.
    total > 0 && 20 * ascii >= 19 * total
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StopwordList {
    words: HashSet<String>,
}

impl StopwordList {
    /// The shipped 179-entry English list (`data/stopwords.txt`).
    pub fn english() -> Self {
        Self::parse(SHIPPED_STOPWORDS).expect("shipped stopword list is non-empty")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let raw = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&raw)
    }

    pub fn parse(raw: &str) -> Result<Self> {
        let words: HashSet<String> = raw
            .lines()
            .map(|l| l.trim().to_lowercase())
            .filter(|l| !l.is_empty())
            .collect();
        if words.is_empty() {
            return Err(Error::MalformedFile("stopword list is empty".into()));
        }
        Ok(Self { words })
    }

    pub fn from_words<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            words: words.into_iter().map(Into::into).collect(),
        }
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}
