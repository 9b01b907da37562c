use std::collections::{HashMap, HashSet};
use std::io::Write;
use std::path::Path;

use anyhow::{anyhow, bail, Context};
use blesseval::analysis::{self, AnnotatedSample, Correlation};
use blesseval::metrics::{self, ble_score, bleu, distinct_n, ent_score, perplexity_from_logprobs, rouge_l, sentence_bleu, wmd};
use blesseval::pipeline::{self, CleanOptions, CorpusRecord, Split};
use blesseval::text::{self, StopwordList};
use blesseval::{load_attribute_bags, load_embeddings, AttributeBags, BagOfWords, BagRole, EmbeddingStore, Error};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::config::{ConfigFile, Overrides, Resolved};
use crate::io::{open_input, open_output, read_jsonl, write_json, write_jsonl};
use crate::{BowArgs, CleanArgs, CliError, CorrelationArg, Exclude, FreqArgs, KappaArgs, ScoreArgs, SplitArgs, StatsArgs, VerifyArgs};

type CmdResult = Result<(), CliError>;

pub struct Global {
    pub file: ConfigFile,
    pub seed: u64,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn read_corpus(path: &Path) -> anyhow::Result<Vec<CorpusRecord>> {
    pipeline::read_corpus(open_input(path)?).with_context(|| format!("reading corpus {}", path.display()))
}

fn load_bags(path: Option<&str>) -> anyhow::Result<AttributeBags> {
    match path {
        Some(p) => load_attribute_bags(p).with_context(|| format!("loading attribute bags {p}")),
        None => Ok(AttributeBags::shipped()),
    }
}

fn load_store(path: &str) -> anyhow::Result<EmbeddingStore> {
    load_embeddings(path).with_context(|| format!("loading embeddings {path}"))
}

fn load_blessing(path: &str) -> anyhow::Result<BagOfWords> {
    BagOfWords::load(path).with_context(|| format!("loading blessing bag {path}"))
}

// ---------------------------------------------------------------------------
// corpus preparation

pub fn clean(_global: &Global, a: CleanArgs) -> CmdResult {
    if a.min_tokens > a.max_tokens {
        return Err(usage("--min-tokens exceeds --max-tokens"));
    }
    let records = read_corpus(&a.input)?;
    let bags = if a.attribute_filter {
        Some(load_bags(a.bags.as_deref().and_then(Path::to_str))?)
    } else {
        None
    };
    let opts = CleanOptions {
        min_tokens: a.min_tokens,
        max_tokens: a.max_tokens,
        attribute_bags: bags.as_ref(),
    };
    let outcome = pipeline::clean_corpus(&records, &opts);
    write_jsonl(a.out.as_deref(), &outcome.kept)?;
    if let Some(path) = &a.rejections {
        let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
        w.write_record(["id", "reason"]).map_err(anyhow::Error::from)?;
        for r in &outcome.rejected {
            w.write_record([r.id.as_str(), &r.reason.to_string()]).map_err(anyhow::Error::from)?;
        }
        w.flush().map_err(anyhow::Error::from)?;
    }
    eprintln!("kept {}, rejected {}", outcome.kept.len(), outcome.rejected.len());
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct SplitLine {
    id: String,
    split: Split,
}

pub fn split(global: &Global, a: SplitArgs) -> CmdResult {
    let ratios: [f64; 3] = a.ratios.as_slice().try_into().map_err(|_| usage("--ratios takes three values"))?;
    let records = read_corpus(&a.input)?;
    let assignment = pipeline::stratified_split(&records, ratios, global.seed).map_err(|e| match e {
        Error::BadRatios(_) | Error::InvalidParameter(_) => usage(e.to_string()),
        other => other.into(),
    })?;
    write_jsonl(
        a.out.as_deref(),
        assignment.assignments.into_iter().map(|(id, split)| SplitLine { id, split }),
    )?;
    Ok(())
}

pub fn stats(a: StatsArgs) -> CmdResult {
    let records = read_corpus(&a.input)?;
    write_json(a.out.as_deref(), &pipeline::corpus_stats(&records))?;
    Ok(())
}

pub fn bow_build(a: BowArgs) -> CmdResult {
    if a.size == 0 {
        return Err(usage("--size must be >= 1"));
    }
    let mut records = read_corpus(&a.input)?;
    if let Some(path) = &a.splits {
        let lines: Vec<SplitLine> = read_jsonl(path)?;
        let train: HashSet<String> = lines.into_iter().filter(|l| l.split == Split::Train).map(|l| l.id).collect();
        records = records
            .into_iter()
            .enumerate()
            .filter(|(i, r)| train.contains(&r.key(*i)))
            .map(|(_, r)| r)
            .collect();
    }
    let stopwords = match &a.stopwords {
        Some(p) => StopwordList::load(p).with_context(|| format!("loading stopwords {}", p.display()))?,
        None => StopwordList::english(),
    };
    let bag = blesseval::build_blessing_bag(&records, a.size, &stopwords)?;
    if bag.len() < a.size {
        eprintln!("warning: only {} distinct non-stopwords available", bag.len());
    }
    let mut out = open_output(a.out.as_deref())?;
    writeln!(out, "{}", bag.to_json()).map_err(anyhow::Error::from)?;
    out.flush().map_err(anyhow::Error::from)?;
    Ok(())
}

pub fn freq(a: FreqArgs) -> CmdResult {
    let records = read_corpus(&a.input)?;
    let mut exclude = HashSet::new();
    if matches!(a.exclude, Exclude::Labels | Exclude::Both) {
        exclude.extend(pipeline::label_vocabulary(&records));
    }
    if matches!(a.exclude, Exclude::Bags | Exclude::Both) {
        exclude.extend(load_bags(a.bags.as_deref().and_then(Path::to_str))?.vocabulary());
    }
    let ranked = pipeline::word_frequencies(&records, &StopwordList::english(), &exclude);
    let take = a.top.unwrap_or(ranked.len());
    let mut w = csv::Writer::from_writer(open_output(a.out.as_deref())?);
    w.write_record(["word", "count"]).map_err(anyhow::Error::from)?;
    for (word, count) in ranked.iter().take(take) {
        w.write_record([word.as_str(), &count.to_string()]).map_err(anyhow::Error::from)?;
    }
    w.flush().map_err(anyhow::Error::from)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// scoring

const METRICS: [&str; 7] = ["ble", "ent", "bleu", "rouge", "distinct", "wmd", "ppl"];

#[derive(Debug, Deserialize)]
struct Hypothesis {
    #[serde(default)]
    id: Option<String>,
    text: String,
    #[serde(default)]
    occasion: Option<String>,
    #[serde(default)]
    object: Option<String>,
}

#[derive(Debug, Deserialize)]
struct Reference {
    #[serde(default)]
    id: Option<String>,
    text: String,
}

#[derive(Debug, Deserialize)]
struct LogProbs {
    #[serde(default)]
    id: Option<String>,
    logprobs: Vec<f64>,
}

/// Pairs side data with hypotheses: by id when every line on both sides has
/// one, otherwise by line order.
fn pair_by_id<T>(hyps: &[Hypothesis], side: Vec<(Option<String>, T)>, what: &str) -> anyhow::Result<Vec<T>> {
    let ids_everywhere = hyps.iter().all(|h| h.id.is_some()) && side.iter().all(|(id, _)| id.is_some());
    if !ids_everywhere {
        if side.len() != hyps.len() {
            bail!("{what}: {} lines for {} hypotheses and no ids to pair by", side.len(), hyps.len());
        }
        return Ok(side.into_iter().map(|(_, v)| v).collect());
    }
    let mut by_id = HashMap::with_capacity(side.len());
    for (id, v) in side {
        let id = id.expect("checked");
        if by_id.contains_key(&id) {
            bail!("{what}: duplicate id {id:?}");
        }
        by_id.insert(id, v);
    }
    hyps.iter()
        .map(|h| {
            let id = h.id.as_ref().expect("checked");
            by_id.remove(id).ok_or_else(|| anyhow!("{what}: no entry for id {id:?}"))
        })
        .collect()
}

struct Resources {
    store: EmbeddingStore,
    bags: AttributeBags,
    blessing: Option<BagOfWords>,
    stopwords: StopwordList,
}

fn null_on(value: blesseval::Result<f64>, soft: fn(&Error) -> bool) -> anyhow::Result<Option<f64>> {
    match value {
        Ok(v) => Ok(Some(v)),
        Err(e) if soft(&e) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn ent_for(
    text: &str,
    occasion: Option<&str>,
    object: Option<&str>,
    res: &Resources,
    cfg: &Resolved,
) -> anyhow::Result<Option<f64>> {
    let (Some(occasion), Some(object)) = (occasion, object) else {
        return Ok(None);
    };
    let (Some(occ_bag), Some(obj_bag)) = (
        res.bags.find(BagRole::Occasion, occasion),
        res.bags.find(BagRole::Object, object),
    ) else {
        return Ok(None);
    };
    Ok(Some(ent_score(text, occ_bag, obj_bag, &res.store, &res.stopwords, &cfg.ent_config())?))
}

fn ble_for(text: &str, res: &Resources, cfg: &Resolved) -> anyhow::Result<Option<f64>> {
    let bag = res.blessing.as_ref().expect("blessing bag loaded");
    null_on(
        ble_score(text, bag, &res.store, &res.stopwords, &cfg.keyword_config()),
        |e| matches!(e, Error::NoCandidates),
    )
}

pub fn score(global: &Global, a: ScoreArgs) -> CmdResult {
    let cfg = Resolved::new(
        global.file.clone(),
        Overrides {
            embedding_path: a.embeddings,
            bags_path: a.bags,
            blessing_bag_path: a.blessing_bag,
            refs_path: a.refs,
            logprobs_path: a.logprobs,
            metrics: a.metrics,
            threshold_t: a.threshold_t,
            bonus_unit: a.bonus_unit,
            keyword_k: a.keyword_k,
            mmr_lambda: a.mmr_lambda,
            bleu_max_n: a.bleu_max_n,
            bleu_smoothing: a.bleu_smoothing,
            filter_stopwords: a.filter_stopwords,
            seed: Some(global.seed),
        },
    )?;
    let mut wanted: Vec<&str> = Vec::new();
    for m in &cfg.metrics {
        let m = m.trim();
        let Some(known) = METRICS.iter().find(|k| **k == m) else {
            return Err(usage(format!("unknown metric {m:?}; expected one of {}", METRICS.join(", "))));
        };
        if !wanted.contains(known) {
            wanted.push(known);
        }
    }
    if wanted.is_empty() {
        return Err(usage("no metrics selected (--metrics)"));
    }
    let has = |m: &str| wanted.contains(&m);
    let needs_refs = has("bleu") || has("rouge") || has("wmd");
    if needs_refs && cfg.refs_path.is_none() {
        return Err(usage("bleu, rouge and wmd need --refs"));
    }
    if has("ppl") && cfg.logprobs_path.is_none() {
        return Err(usage("ppl needs --logprobs"));
    }
    if (has("ble") || has("wmd")) && cfg.embedding_path.is_none() {
        return Err(usage("ble and wmd need --embeddings"));
    }
    if has("ble") && cfg.blessing_bag_path.is_none() {
        return Err(usage("ble needs --blessing-bag"));
    }

    let hyps: Vec<Hypothesis> = read_jsonl(&a.input)?;
    let refs: Option<Vec<String>> = match (&cfg.refs_path, needs_refs) {
        (Some(p), true) => {
            let raw: Vec<Reference> = read_jsonl(Path::new(p))?;
            Some(pair_by_id(&hyps, raw.into_iter().map(|r| (r.id, r.text)).collect(), "refs")?)
        }
        _ => None,
    };
    let logprobs: Option<Vec<Vec<f64>>> = match (&cfg.logprobs_path, has("ppl")) {
        (Some(p), true) => {
            let raw: Vec<LogProbs> = read_jsonl(Path::new(p))?;
            Some(pair_by_id(&hyps, raw.into_iter().map(|r| (r.id, r.logprobs)).collect(), "logprobs")?)
        }
        _ => None,
    };
    let res = Resources {
        store: match &cfg.embedding_path {
            Some(p) if has("ble") || has("ent") || has("wmd") => load_store(p)?,
            // ENT without vectors degrades to exact bag membership.
            _ => EmbeddingStore::empty(1)?,
        },
        bags: load_bags(cfg.bags_path.as_deref())?,
        blessing: match &cfg.blessing_bag_path {
            Some(p) if has("ble") => Some(load_blessing(p)?),
            _ => None,
        },
        stopwords: StopwordList::english(),
    };

    let hyp_tokens: Vec<Vec<String>> = hyps.par_iter().map(|h| text::words(&h.text)).collect();
    let ref_tokens: Option<Vec<Vec<String>>> =
        refs.as_ref().map(|r| r.par_iter().map(|t| text::words(t)).collect());
    let bleu_cfg = cfg.bleu_config();

    let rows: Vec<Map<String, Value>> = (0..hyps.len())
        .into_par_iter()
        .map(|i| -> anyhow::Result<Map<String, Value>> {
            let h = &hyps[i];
            let mut row = Map::new();
            row.insert("id".into(), json!(h.id.clone().unwrap_or_else(|| i.to_string())));
            if has("ble") {
                row.insert("ble".into(), json!(ble_for(&h.text, &res, &cfg)?));
            }
            if has("ent") {
                let v = ent_for(&h.text, h.occasion.as_deref(), h.object.as_deref(), &res, &cfg)?;
                row.insert("ent".into(), json!(v));
            }
            if let Some(rt) = &ref_tokens {
                if has("bleu") {
                    let v = null_on(sentence_bleu(&hyp_tokens[i], &rt[i], &bleu_cfg), |e| {
                        matches!(e, Error::EmptyInput)
                    })?;
                    row.insert("bleu".into(), json!(v));
                }
                if has("rouge") {
                    row.insert("rouge_l".into(), json!(rouge_l(&hyp_tokens[i], &rt[i])));
                }
                if has("wmd") {
                    let v = null_on(wmd(&hyp_tokens[i], &rt[i], &res.store, &res.stopwords), |e| {
                        matches!(e, Error::EmptyAfterFiltering | Error::OovOnly)
                    })?;
                    row.insert("wmd".into(), json!(v));
                }
            }
            if let Some(lp) = &logprobs {
                let v = null_on(perplexity_from_logprobs(&[&lp[i]]), |e| matches!(e, Error::EmptyRecord(_)))?;
                row.insert("ppl".into(), json!(v));
            }
            Ok(row)
        })
        .collect::<anyhow::Result<_>>()?;

    let mut aggregate = Map::new();
    for key in ["ble", "ent", "bleu", "rouge_l", "wmd", "ppl"] {
        let values: Vec<f64> = rows.iter().filter_map(|r| r.get(key)).filter_map(Value::as_f64).collect();
        let present = rows.iter().filter(|r| r.contains_key(key)).count();
        if present == 0 {
            continue;
        }
        aggregate.insert(
            key.into(),
            json!({
                "mean": metrics::mean(&values),
                "scored": values.len(),
                "null": present - values.len(),
            }),
        );
    }

    let mut corpus = Map::new();
    if let (true, Some(rt)) = (has("bleu"), &ref_tokens) {
        let v = null_on(bleu(&hyp_tokens, rt, &bleu_cfg), |e| matches!(e, Error::EmptyInput))?;
        corpus.insert("bleu".into(), json!(v));
    }
    if let (true, Some(rt)) = (has("rouge"), &ref_tokens) {
        corpus.insert("rouge_l".into(), json!(metrics::rouge_l_corpus(&hyp_tokens, rt)));
    }
    if has("distinct") {
        for n in 1..=3 {
            let v = null_on(distinct_n(&hyp_tokens, n), |e| matches!(e, Error::EmptyInput))?;
            corpus.insert(format!("distinct_{n}"), json!(v));
        }
    }
    if let Some(lp) = &logprobs {
        let non_empty: Vec<&Vec<f64>> = lp.iter().filter(|r| !r.is_empty()).collect();
        let v = null_on(perplexity_from_logprobs(&non_empty), |e| matches!(e, Error::EmptyInput))?;
        corpus.insert("perplexity".into(), json!(v));
    }

    let report = json!({
        "config": cfg,
        "input": a.input.display().to_string(),
        "count": rows.len(),
        "rows": rows,
        "aggregate": aggregate,
        "corpus": corpus,
    });
    write_json(a.out.as_deref(), &report)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// annotation analysis

fn read_annotations(path: &Path) -> anyhow::Result<Vec<AnnotatedSample>> {
    let samples: Vec<AnnotatedSample> = read_jsonl(path)?;
    if samples.is_empty() {
        bail!("{}: no annotations", path.display());
    }
    for (i, s) in samples.iter().enumerate() {
        s.validate().with_context(|| format!("annotation line {}", i + 1))?;
    }
    Ok(samples)
}

pub fn kappa(a: KappaArgs) -> CmdResult {
    let samples = read_annotations(&a.input)?;
    let matrix = analysis::ratings_matrix(&samples)?;
    let kappa = analysis::fleiss_kappa(&matrix)?;
    let mut counts = [0usize; analysis::LABEL_COUNT];
    let mut tied = 0;
    for s in &samples {
        let m = s.majority()?;
        counts[usize::from(m.label)] += 1;
        tied += usize::from(m.tied);
    }
    if tied > 0 {
        eprintln!("{tied} item(s) had a tied majority vote; resolved to the lower label");
    }
    write_json(
        a.out.as_deref(),
        &json!({
            "kappa": kappa,
            "items": samples.len(),
            "raters": samples[0].ratings.len(),
            "majority_counts": counts,
            "tied_items": tied,
        }),
    )?;
    Ok(())
}

pub fn verify(global: &Global, a: VerifyArgs) -> CmdResult {
    let cfg = Resolved::new(
        global.file.clone(),
        Overrides {
            embedding_path: a.embeddings,
            bags_path: a.bags,
            blessing_bag_path: a.blessing_bag,
            threshold_t: a.threshold_t,
            bonus_unit: a.bonus_unit,
            keyword_k: a.keyword_k,
            mmr_lambda: a.mmr_lambda,
            seed: Some(global.seed),
            ..Default::default()
        },
    )?;
    let Some(embedding_path) = &cfg.embedding_path else {
        return Err(usage("verify needs --embeddings"));
    };
    let Some(blessing_path) = &cfg.blessing_bag_path else {
        return Err(usage("verify needs --blessing-bag"));
    };
    if a.steps < 2 || a.subset_size == 0 {
        return Err(usage("--steps must be >= 2 and --subset-size >= 1"));
    }
    let samples = read_annotations(&a.input)?;
    let res = Resources {
        store: load_store(embedding_path)?,
        bags: load_bags(cfg.bags_path.as_deref())?,
        blessing: Some(load_blessing(blessing_path)?),
        stopwords: StopwordList::english(),
    };
    let labels: Vec<u8> = samples
        .iter()
        .map(|s| s.majority().map(|m| m.label))
        .collect::<blesseval::Result<_>>()?;

    // Each sample is scored once; subsets index into these.
    let ble: Vec<f64> = samples
        .par_iter()
        .map(|s| ble_for(&s.text, &res, &cfg).map(|v| v.unwrap_or(0.0)))
        .collect::<anyhow::Result<_>>()?;
    let ent: Vec<f64> = samples
        .par_iter()
        .map(|s| {
            ent_for(&s.text, Some(&s.occasion), Some(&s.object), &res, &cfg)?
                .ok_or_else(|| anyhow!("no attribute bag for ({}, {})", s.occasion, s.object))
        })
        .collect::<anyhow::Result<_>>()?;

    let correlation = match a.correlation {
        CorrelationArg::Pearson => Correlation::Pearson,
        CorrelationArg::Spearman => Correlation::Spearman,
    };
    std::fs::create_dir_all(&a.out_dir).with_context(|| format!("creating {}", a.out_dir.display()))?;
    let mut summary = Map::new();
    for (name, scores, min_label) in [("ble", &ble, 1u8), ("ent", &ent, 2u8)] {
        let (pos, neg): (Vec<usize>, Vec<usize>) = (0..samples.len()).partition(|&i| labels[i] >= min_label);
        let subsets = analysis::build_proportion_subsets(&pos, &neg, a.subset_size, a.steps, global.seed)
            .with_context(|| format!("{name} subsets"))?;
        let curve = analysis::verification_curve(&subsets, correlation, |&i| Ok(scores[i]))
            .with_context(|| format!("{name} curve"))?;
        let path = a.out_dir.join(format!("{name}_curve.csv"));
        let mut w = csv::Writer::from_path(&path).with_context(|| format!("creating {}", path.display()))?;
        w.write_record(["proportion", "positives", "mean_score"]).map_err(anyhow::Error::from)?;
        for (p, s) in curve.points.iter().zip(&subsets) {
            w.write_record([p.proportion.to_string(), s.positives.to_string(), p.mean_score.to_string()])
                .map_err(anyhow::Error::from)?;
        }
        w.flush().map_err(anyhow::Error::from)?;
        summary.insert(
            name.into(),
            json!({
                "pearson_r": curve.pearson_r,
                "correlation": curve.correlation,
                "positive_pool": pos.len(),
                "negative_pool": neg.len(),
                "points": curve.points,
            }),
        );
    }
    summary.insert("seed".into(), json!(global.seed));
    summary.insert("subset_size".into(), json!(a.subset_size));
    summary.insert("steps".into(), json!(a.steps));
    summary.insert("config".into(), json!(cfg));
    write_json(Some(&a.out_dir.join("summary.json")), &summary)?;
    Ok(())
}
