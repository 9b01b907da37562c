//! Run configuration: defaults, overlaid by a `--config` JSON file, overlaid
//! by command-line flags. The resolved value is echoed into score reports and
//! can be fed back through `--config`.

use std::path::Path;

use anyhow::Context;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const TOOL_VERSION: &str = concat!("blesseval ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub embedding_path: Option<String>,
    pub bags_path: Option<String>,
    pub blessing_bag_path: Option<String>,
    pub refs_path: Option<String>,
    pub logprobs_path: Option<String>,
    pub metrics: Option<Vec<String>>,
    pub threshold_t: Option<f64>,
    pub bonus_unit: Option<f64>,
    pub keyword_k: Option<usize>,
    pub mmr_lambda: Option<f64>,
    pub bleu_max_n: Option<usize>,
    pub bleu_smoothing: Option<bool>,
    pub filter_stopwords: Option<bool>,
    pub seed: Option<u64>,
    /// Informational; written by the tool, ignored on load.
    pub tool_version: Option<String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let raw = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))
            .map_err(CliError::Data)?;
        serde_json::from_str(&raw).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
    }
}

/// Fully resolved settings shared by the scoring commands.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Resolved {
    pub embedding_path: Option<String>,
    pub bags_path: Option<String>,
    pub blessing_bag_path: Option<String>,
    pub refs_path: Option<String>,
    pub logprobs_path: Option<String>,
    pub metrics: Vec<String>,
    pub threshold_t: f64,
    pub bonus_unit: f64,
    pub keyword_k: usize,
    pub mmr_lambda: f64,
    pub bleu_max_n: usize,
    pub bleu_smoothing: bool,
    pub filter_stopwords: bool,
    pub seed: u64,
    pub tool_version: String,
}

/// Values given on the command line; `None` means "not given".
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub embedding_path: Option<String>,
    pub bags_path: Option<String>,
    pub blessing_bag_path: Option<String>,
    pub refs_path: Option<String>,
    pub logprobs_path: Option<String>,
    pub metrics: Option<Vec<String>>,
    pub threshold_t: Option<f64>,
    pub bonus_unit: Option<f64>,
    pub keyword_k: Option<usize>,
    pub mmr_lambda: Option<f64>,
    pub bleu_max_n: Option<usize>,
    pub bleu_smoothing: Option<bool>,
    pub filter_stopwords: Option<bool>,
    pub seed: Option<u64>,
}

impl Resolved {
    pub fn new(file: ConfigFile, cli: Overrides) -> Result<Self, CliError> {
        let resolved = Self {
            embedding_path: cli.embedding_path.or(file.embedding_path),
            bags_path: cli.bags_path.or(file.bags_path),
            blessing_bag_path: cli.blessing_bag_path.or(file.blessing_bag_path),
            refs_path: cli.refs_path.or(file.refs_path),
            logprobs_path: cli.logprobs_path.or(file.logprobs_path),
            metrics: cli.metrics.or(file.metrics).unwrap_or_default(),
            threshold_t: cli.threshold_t.or(file.threshold_t).unwrap_or(0.4),
            bonus_unit: cli.bonus_unit.or(file.bonus_unit).unwrap_or(0.5),
            keyword_k: cli.keyword_k.or(file.keyword_k).unwrap_or(10),
            mmr_lambda: cli.mmr_lambda.or(file.mmr_lambda).unwrap_or(0.5),
            bleu_max_n: cli.bleu_max_n.or(file.bleu_max_n).unwrap_or(4),
            bleu_smoothing: cli.bleu_smoothing.or(file.bleu_smoothing).unwrap_or(false),
            filter_stopwords: cli.filter_stopwords.or(file.filter_stopwords).unwrap_or(true),
            seed: cli.seed.or(file.seed).unwrap_or(0),
            tool_version: TOOL_VERSION.to_string(),
        };
        resolved.validate()?;
        Ok(resolved)
    }

    fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Usage(msg));
        if !(self.threshold_t > 0.0 && self.threshold_t < 1.0) {
            return bad(format!("threshold_t must be in (0, 1), got {}", self.threshold_t));
        }
        if !(self.bonus_unit >= 0.0) {
            return bad(format!("bonus_unit must be >= 0, got {}", self.bonus_unit));
        }
        if self.keyword_k == 0 {
            return bad("keyword_k must be >= 1".into());
        }
        if !(0.0..=1.0).contains(&self.mmr_lambda) {
            return bad(format!("mmr_lambda must be in [0, 1], got {}", self.mmr_lambda));
        }
        if self.bleu_max_n == 0 {
            return bad("bleu_max_n must be >= 1".into());
        }
        Ok(())
    }

    pub fn ent_config(&self) -> blesseval::metrics::EntConfig {
        blesseval::metrics::EntConfig {
            threshold_t: self.threshold_t,
            bonus_unit: self.bonus_unit,
            filter_stopwords: self.filter_stopwords,
        }
    }

    pub fn keyword_config(&self) -> blesseval::KeywordConfig {
        blesseval::KeywordConfig {
            k: self.keyword_k,
            mmr_lambda: self.mmr_lambda,
        }
    }

    pub fn bleu_config(&self) -> blesseval::metrics::BleuConfig {
        blesseval::metrics::BleuConfig {
            max_n: self.bleu_max_n,
            smoothing: self.bleu_smoothing,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file_override_defaults() {
        let file = ConfigFile {
            threshold_t: Some(0.3),
            keyword_k: Some(5),
            ..Default::default()
        };
        let cli = Overrides {
            threshold_t: Some(0.6),
            ..Default::default()
        };
        let r = Resolved::new(file, cli).unwrap();
        assert_eq!(r.threshold_t, 0.6);
        assert_eq!(r.keyword_k, 5);
        assert_eq!(r.bonus_unit, 0.5);
    }

    #[test]
    fn echo_round_trips() {
        let r = Resolved::new(ConfigFile::default(), Overrides::default()).unwrap();
        let echoed: ConfigFile = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        assert_eq!(Resolved::new(echoed, Overrides::default()).unwrap(), r);
    }

    #[test]
    fn rejects_bad_values() {
        let cli = Overrides {
            threshold_t: Some(1.5),
            ..Default::default()
        };
        assert!(matches!(Resolved::new(ConfigFile::default(), cli), Err(CliError::Usage(_))));
        assert!(serde_json::from_str::<ConfigFile>(r#"{"threshhold": 1}"#).is_err());
    }
}
