//! Annotation agreement and metric-vs-human verification curves.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Human labels: 0 common, 1 personalized, 2 personalized and entangled.
pub const LABEL_COUNT: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatedSample {
    pub text: String,
    pub occasion: String,
    pub object: String,
    pub ratings: Vec<u8>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Majority {
    pub label: u8,
    /// More than one label shared the top count; the lowest was taken.
    pub tied: bool,
}

impl AnnotatedSample {
    pub fn validate(&self) -> Result<()> {
        if self.ratings.is_empty() {
            return Err(Error::InvalidParameter("sample has no ratings".into()));
        }
        if let Some(bad) = self.ratings.iter().find(|&&r| usize::from(r) >= LABEL_COUNT) {
            return Err(Error::InvalidParameter(format!("rating {bad} outside 0..=2")));
        }
        Ok(())
    }

    pub fn majority(&self) -> Result<Majority> {
        self.validate()?;
        Ok(majority_vote(&self.ratings))
    }
}

/// Mode of the ratings; ties resolve to the lowest tied label.
pub fn majority_vote(ratings: &[u8]) -> Majority {
    let mut counts = [0usize; 256];
    for &r in ratings {
        counts[usize::from(r)] += 1;
    }
    let top = counts.iter().copied().max().unwrap_or(0);
    let label = counts.iter().position(|&c| c == top).unwrap_or(0) as u8;
    Majority {
        label,
        tied: counts.iter().filter(|&&c| c == top).count() > 1,
    }
}

/// Items x categories count matrix from per-item label lists.
pub fn ratings_matrix(samples: &[AnnotatedSample]) -> Result<Vec<Vec<usize>>> {
    samples
        .iter()
        .map(|s| {
            s.validate()?;
            let mut row = vec![0usize; LABEL_COUNT];
            for &r in &s.ratings {
                row[usize::from(r)] += 1;
            }
            Ok(row)
        })
        .collect()
}

/// Fleiss' kappa over an items x categories matrix of rater counts.
pub fn fleiss_kappa<R: AsRef<[usize]>>(matrix: &[R]) -> Result<f64> {
    let first = matrix.first().ok_or(Error::EmptyInput)?;
    let raters: usize = first.as_ref().iter().sum();
    let categories = first.as_ref().len();
    for (item, row) in matrix.iter().enumerate() {
        let row = row.as_ref();
        if row.len() != categories {
            return Err(Error::DimensionMismatch {
                left: categories,
                right: row.len(),
            });
        }
        let found: usize = row.iter().sum();
        if found != raters {
            return Err(Error::UnequalRaterCounts {
                item,
                expected: raters,
                found,
            });
        }
    }
    if raters < 2 {
        return Err(Error::InvalidParameter("fleiss kappa needs at least 2 raters".into()));
    }
    let items = matrix.len() as f64;
    let n = raters as f64;

    let mut category_totals = vec![0usize; categories];
    let mut agreement = 0.0;
    for row in matrix {
        let row = row.as_ref();
        let pairs: usize = row.iter().map(|&c| c * c.saturating_sub(1)).sum();
        agreement += pairs as f64 / (n * (n - 1.0));
        for (t, &c) in category_totals.iter_mut().zip(row) {
            *t += c;
        }
    }
    let p_bar = agreement / items;
    let p_e: f64 = category_totals
        .iter()
        .map(|&t| {
            let p = t as f64 / (items * n);
            p * p
        })
        .sum();
    if (1.0 - p_e).abs() < 1e-15 {
        return Err(Error::DegenerateExpectedAgreement);
    }
    if p_bar == 1.0 {
        return Ok(1.0);
    }
    Ok((p_bar - p_e) / (1.0 - p_e))
}

/// One verification subset: the target proportion of positives and its samples.
#[derive(Debug, Clone, PartialEq)]
pub struct ProportionSubset<T> {
    pub proportion: f64,
    pub positives: usize,
    pub samples: Vec<T>,
}

/// Builds `steps` subsets of `subset_size` samples with the positive share
/// running evenly from 0 to 1. Samples are drawn without replacement within
/// a subset; pools are reused across subsets.
pub fn build_proportion_subsets<T: Clone>(
    positives: &[T],
    negatives: &[T],
    subset_size: usize,
    steps: usize,
    seed: u64,
) -> Result<Vec<ProportionSubset<T>>> {
    if steps < 2 {
        return Err(Error::InvalidParameter("need at least 2 steps".into()));
    }
    if subset_size == 0 {
        return Err(Error::InvalidParameter("subset size must be >= 1".into()));
    }
    for pool in [positives, negatives] {
        if pool.len() < subset_size {
            return Err(Error::InsufficientPool {
                available: pool.len(),
                required: subset_size,
            });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..steps)
        .map(|k| {
            let proportion = k as f64 / (steps - 1) as f64;
            let n_pos = (proportion * subset_size as f64).round() as usize;
            let mut samples: Vec<T> = positives.choose_multiple(&mut rng, n_pos).cloned().collect();
            samples.extend(negatives.choose_multiple(&mut rng, subset_size - n_pos).cloned());
            ProportionSubset {
                proportion,
                positives: n_pos,
                samples,
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Correlation {
    #[default]
    Pearson,
    Spearman,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    pub proportion: f64,
    pub mean_score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationCurve {
    pub points: Vec<CurvePoint>,
    pub correlation: Correlation,
    /// Correlation between proportion and mean score.
    pub pearson_r: f64,
}

/// Scores every subset and correlates the mean score with the proportion.
pub fn verification_curve<T, F>(
    subsets: &[ProportionSubset<T>],
    correlation: Correlation,
    mut metric: F,
) -> Result<VerificationCurve>
where
    F: FnMut(&T) -> Result<f64>,
{
    if subsets.len() < 2 {
        return Err(Error::InvalidParameter("need at least 2 subsets".into()));
    }
    let mut points = Vec::with_capacity(subsets.len());
    for subset in subsets {
        if subset.samples.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut scores = Vec::with_capacity(subset.samples.len());
        for s in &subset.samples {
            scores.push(metric(s)?);
        }
        points.push(CurvePoint {
            proportion: subset.proportion,
            mean_score: crate::metrics::mean(&scores).expect("non-empty"),
        });
    }
    let xs: Vec<f64> = points.iter().map(|p| p.proportion).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.mean_score).collect();
    let r = match correlation {
        Correlation::Pearson => pearson(&xs, &ys)?,
        Correlation::Spearman => spearman(&xs, &ys)?,
    };
    Ok(VerificationCurve {
        points,
        correlation,
        pearson_r: r,
    })
}

pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            left: xs.len(),
            right: ys.len(),
        });
    }
    if xs.len() < 2 {
        return Err(Error::ConstantSeries);
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    // relative test so rounding noise in a constant series is not read as signal
    let scale_x = xs.iter().map(|x| x.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let scale_y = ys.iter().map(|y| y.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    if sxx <= 1e-24 * scale_x * scale_x * n || syy <= 1e-24 * scale_y * scale_y * n {
        return Err(Error::ConstantSeries);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

fn ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman's rho: Pearson correlation of average ranks.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<f64> {
    pearson(&ranks(xs), &ranks(ys))
}
