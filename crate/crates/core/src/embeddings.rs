//! Word-vector table, cosine similarity and the bag-similarity kernel.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::lexicons::BagOfWords;

/// Returned by [`bag_similarity`] when a word has no vector and is not a
/// verbatim bag member. It sits below every usable threshold.
pub const NO_EVIDENCE: f64 = -1.0;

/// Immutable word -> vector table. Vectors keep their original magnitude
/// (needed for Euclidean ground costs); norms are cached for cosines.
#[derive(Debug, Clone)]
pub struct EmbeddingStore {
    dimension: usize,
    index: HashMap<String, usize>,
    words: Vec<String>,
    data: Vec<f64>,
    norms: Vec<f64>,
}

impl EmbeddingStore {
    /// A store with no vocabulary; every lookup misses.
    pub fn empty(dimension: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidParameter("embedding dimension must be >= 1".into()));
        }
        Ok(Self {
            dimension,
            index: HashMap::new(),
            words: Vec::new(),
            data: Vec::new(),
            norms: Vec::new(),
        })
    }

    /// Builds a store from `(word, vector)` pairs. Later duplicates are ignored.
    pub fn from_pairs<I, S>(dimension: usize, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Vec<f64>)>,
        S: Into<String>,
    {
        let mut store = Self::empty(dimension)?;
        for (word, vector) in pairs {
            store.insert(word.into(), &vector)?;
        }
        Ok(store)
    }

    fn insert(&mut self, word: String, vector: &[f64]) -> Result<()> {
        if vector.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                left: self.dimension,
                right: vector.len(),
            });
        }
        if self.index.contains_key(&word) {
            return Ok(());
        }
        let norm = norm(vector);
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroVector { word });
        }
        self.index.insert(word.clone(), self.words.len());
        self.words.push(word);
        self.data.extend_from_slice(vector);
        self.norms.push(norm);
        Ok(())
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index.contains_key(word)
    }

    pub fn get(&self, word: &str) -> Option<&[f64]> {
        self.index.get(word).map(|&i| self.row(i))
    }

    /// Words in insertion order.
    pub fn words(&self) -> &[String] {
        &self.words
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dimension..(i + 1) * self.dimension]
    }

    /// Cosine between two in-vocabulary words.
    pub fn similarity(&self, a: &str, b: &str) -> Option<f64> {
        let (&i, &j) = (self.index.get(a)?, self.index.get(b)?);
        Some(clamp_unit(dot(self.row(i), self.row(j)) / (self.norms[i] * self.norms[j])))
    }

    /// Writes the store in the text vector format with a `V D` header.
    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = BufWriter::new(file);
        self.write_to(&mut out).map_err(|e| Error::io(path, e))?;
        out.flush().map_err(|e| Error::io(path, e))
    }

    pub fn write_to<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "{} {}", self.len(), self.dimension)?;
        for (i, word) in self.words.iter().enumerate() {
            write!(out, "{word}")?;
            for x in self.row(i) {
                write!(out, " {x}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// Loads word vectors from the whitespace-separated text format.
///
/// An optional `V D` header is recognised when the first line has exactly two
/// integer fields. Without a header the dimension comes from the first vector.
pub fn load_embeddings(path: impl AsRef<Path>) -> Result<EmbeddingStore> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_embeddings(BufReader::new(file)).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}

pub fn read_embeddings<R: BufRead>(reader: R) -> Result<EmbeddingStore> {
    let mut store: Option<EmbeddingStore> = None;
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::io("<embeddings>", e))?;
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(' ').collect();
        if idx == 0 && is_header(&fields) {
            let dim: usize = fields[1].parse().expect("checked by is_header");
            store = Some(EmbeddingStore::empty(dim).map_err(|_| Error::MalformedLine {
                line: line_no,
                reason: "header declares dimension 0".into(),
            })?);
            continue;
        }
        let (word, comps) = fields.split_first().expect("non-empty line");
        if comps.is_empty() {
            return Err(Error::MalformedLine {
                line: line_no,
                reason: format!("word {word:?} has no components"),
            });
        }
        let vector = comps
            .iter()
            .map(|c| c.parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| Error::MalformedLine {
                line: line_no,
                reason: e.to_string(),
            })?;
        let store = match &mut store {
            Some(s) => s,
            None => store.insert(EmbeddingStore::empty(vector.len())?),
        };
        if vector.len() != store.dimension {
            return Err(Error::MalformedLine {
                line: line_no,
                reason: format!(
                    "expected {} components, found {}",
                    store.dimension,
                    vector.len()
                ),
            });
        }
        store.insert((*word).to_string(), &vector)?;
    }
    match store {
        Some(s) if !s.is_empty() => Ok(s),
        _ => Err(Error::EmptyFile),
    }
}

fn is_header(fields: &[&str]) -> bool {
    fields.len() == 2 && fields.iter().all(|f| f.parse::<u64>().is_ok())
}

fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

fn norm(u: &[f64]) -> f64 {
    dot(u, u).sqrt()
}

fn clamp_unit(x: f64) -> f64 {
    x.clamp(-1.0, 1.0)
}

pub fn euclidean(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// Cosine of the angle between `u` and `v`, clamped to `[-1, 1]`.
pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            left: u.len(),
            right: v.len(),
        });
    }
    let (nu, nv) = (norm(u), norm(v));
    if nu == 0.0 {
        return Err(Error::ZeroVector { word: "<u>".into() });
    }
    if nv == 0.0 {
        return Err(Error::ZeroVector { word: "<v>".into() });
    }
    Ok(clamp_unit(dot(u, v) / (nu * nv)))
}

/// Maximum cosine between `word` and any in-vocabulary bag member.
///
/// Verbatim membership short-circuits to 1.0. A word with no vector (or a bag
/// with no vectors) yields [`NO_EVIDENCE`].
pub fn bag_similarity(word: &str, bag: &BagOfWords, store: &EmbeddingStore) -> Result<f64> {
    if bag.is_empty() {
        return Err(Error::EmptyBag(bag.name.clone()));
    }
    if bag.contains(word) {
        return Ok(1.0);
    }
    if !store.contains(word) {
        return Ok(NO_EVIDENCE);
    }
    Ok(bag
        .words()
        .iter()
        .filter_map(|b| store.similarity(word, b))
        .fold(NO_EVIDENCE, f64::max))
}

/// Deterministic random unit vectors for tests and synthetic experiments.
///
/// Each word's vector depends only on `(seed, word)`, so two toy stores built
/// with the same seed agree on their shared words.
pub fn toy_embeddings<S: AsRef<str>>(seed: u64, words: &[S], dimension: usize) -> Result<EmbeddingStore> {
    let mut store = EmbeddingStore::empty(dimension)?;
    for word in words {
        let word = word.as_ref();
        if store.contains(word) {
            continue;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ fnv1a(word.as_bytes()));
        let vector = loop {
            let v: Vec<f64> = (0..dimension).map(|_| StandardNormal.sample(&mut rng)).collect();
            let n = norm(&v);
            if n > 1e-6 {
                break v.into_iter().map(|x| x / n).collect::<Vec<_>>();
            }
        };
        store.insert(word.to_string(), &vector)?;
    }
    Ok(store)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}
