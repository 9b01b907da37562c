//! Scoring functions.
//!
//! The attribute metrics ([`ble_score`], [`ent_score`]) operate on raw text;
//! the reference-based and diversity metrics take pre-tokenized input so
//! callers control tokenization once per corpus.

mod ble;
mod bleu;
mod distinct;
mod ent;
mod perplexity;
mod rouge;
pub mod transport;
mod wmd;

pub use ble::ble_score;
pub use bleu::{bleu, sentence_bleu, BleuConfig};
pub use distinct::distinct_n;
pub use ent::{ent_breakdown, ent_score, EntBreakdown, EntConfig, Role};
pub use perplexity::perplexity_from_logprobs;
pub use rouge::{lcs_len, rouge_l, rouge_l_corpus};
pub use wmd::{nbow, rwmd, rwmd_nbow, wmd, wmd_nbow, Nbow};

use serde::Serialize;

/// A named metric value with optional per-record breakdown.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricValue {
    pub name: String,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_record: Option<Vec<f64>>,
}

/// Order-stable compensated (Neumaier) sum.
pub fn stable_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for x in values {
        let t = sum + x;
        comp += if sum.abs() >= x.abs() {
            (sum - t) + x
        } else {
            (x - t) + sum
        };
        sum = t;
    }
    sum + comp
}

pub fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| stable_sum(values.iter().copied()) / values.len() as f64)
}
