//! Evaluation toolkit for attribute-controlled blessing generation.
//!
//! * [`text`]: tokenizer, clause segmentation, n-grams, stopwords.
//! * [`embeddings`]: word-vector loading, cosine and bag similarity.
//! * [`lexicons`]: blessing bag (corpus frequency) and occasion/object bags.
//! * [`keywords`]: MMR keyword extraction over word vectors.
//! * [`metrics`]: blessing score, entanglement score, BLEU, ROUGE-L,
//!   Distinct-n, word mover's distance, perplexity aggregation.
//! * [`pipeline`]: corpus cleaning, stratified splits, statistics.
//! * [`analysis`]: Fleiss' kappa and metric verification curves.

pub mod analysis;
pub mod embeddings;
mod error;
pub mod keywords;
pub mod lexicons;
pub mod metrics;
pub mod pipeline;
pub mod text;

pub use embeddings::{bag_similarity, cosine, load_embeddings, toy_embeddings, EmbeddingStore};
pub use error::{Error, Result};
pub use keywords::{extract_keywords, KeywordConfig, KeywordList};
pub use lexicons::{build_blessing_bag, load_attribute_bags, AttributeBags, BagOfWords, BagRole};
pub use pipeline::CorpusRecord;
pub use text::{segment_clauses, tokenize, StopwordList};
