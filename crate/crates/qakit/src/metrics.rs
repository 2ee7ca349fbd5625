//! Sentence- and corpus-level answer scoring: BLEU, BLEU-1, chrF and
//! exact-match METEOR, plus the per-property METEOR ranking.
//!
//! BLEU uses a min(1, length-ratio) penalty over the geometric mean of
//! clipped n-gram precisions; orders the hypothesis is too short to have
//! are excluded, and add-one smoothing (default) keeps higher orders
//! nonzero so that very short gold answers remain scoreable. chrF
//! averages per-order character n-gram F-scores with recall weighted
//! beta-fold. METEOR here is the exact-match variant: no stemming or
//! synonymy stages, only greedy leftmost unigram alignment with the
//! fragmentation penalty.
//!
//! All scores are in [0, 100]. Corpus values are unweighted means of
//! per-sentence scores.

use std::collections::HashMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BleuSmoothing {
    None,
    /// `(matches + 1) / (total + 1)` for every order above 1.
    AddOneForHigherOrders,
}

#[derive(Debug, Clone)]
pub struct MetricConfig {
    pub bleu_max_n: usize,
    pub chrf_beta: f64,
    pub chrf_max_n: usize,
    pub chrf_ignore_whitespace: bool,
    pub meteor_alpha: f64,
    pub meteor_penalty_gamma: f64,
    pub meteor_penalty_beta: f64,
    pub bleu_smoothing: BleuSmoothing,
}

impl Default for MetricConfig {
    fn default() -> Self {
        MetricConfig {
            bleu_max_n: 4,
            chrf_beta: 3.0,
            chrf_max_n: 6,
            chrf_ignore_whitespace: true,
            meteor_alpha: 0.9,
            meteor_penalty_gamma: 0.5,
            meteor_penalty_beta: 3.0,
            bleu_smoothing: BleuSmoothing::AddOneForHigherOrders,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum MetricError {
    #[error("empty gold standard")]
    EmptyReference,
    #[error("empty gold standard at record {record}")]
    EmptyReferenceAt { record: usize },
    #[error(
        "hypothesis and gold files have different lengths: {hyp} hypotheses vs {gold} gold answers"
    )]
    CountMismatch { hyp: usize, gold: usize },
    #[error("no property metadata")]
    NoPropertyMetadata,
}

/// One scoring unit: a generated answer against its gold answer.
#[derive(Debug, Clone)]
pub struct EvalRecord {
    pub question: String,
    pub hypothesis: String,
    pub reference: String,
    pub property_label: String,
}

/// Zips hypothesis lines with gold pairs, enforcing equal counts.
pub fn align_records(
    hypotheses: &[String],
    gold: &[crate::dbpedia::QaPair],
) -> Result<Vec<EvalRecord>, MetricError> {
    if hypotheses.len() != gold.len() {
        return Err(MetricError::CountMismatch {
            hyp: hypotheses.len(),
            gold: gold.len(),
        });
    }
    Ok(hypotheses
        .iter()
        .zip(gold)
        .map(|(hyp, pair)| EvalRecord {
            question: pair.question.clone(),
            hypothesis: hyp.clone(),
            reference: pair.answer.clone(),
            property_label: pair.property_label.clone(),
        })
        .collect())
}

fn tokens(text: &str) -> Vec<&str> {
    text.split_whitespace().collect()
}

/// Clipped n-gram matches and hypothesis n-gram total for one order.
fn clipped_word_ngrams(hyp: &[&str], reference: &[&str], n: usize) -> (usize, usize) {
    if hyp.len() < n {
        return (0, 0);
    }
    let total = hyp.len() - n + 1;
    let mut ref_counts: HashMap<&[&str], usize> = HashMap::new();
    if reference.len() >= n {
        for gram in reference.windows(n) {
            *ref_counts.entry(gram).or_insert(0) += 1;
        }
    }
    let mut matches = 0;
    for gram in hyp.windows(n) {
        if let Some(count) = ref_counts.get_mut(gram) {
            if *count > 0 {
                *count -= 1;
                matches += 1;
            }
        }
    }
    (matches, total)
}

/// BLEU over words, per the displayed formula: `min(1, |hyp|/|ref|)`
/// times the geometric mean of clipped n-gram precisions for
/// n = 1..=bleu_max_n. Orders where the hypothesis has no n-grams are
/// excluded from the mean; an empty hypothesis scores 0.
pub fn sentence_bleu(
    hyp: &str,
    reference: &str,
    config: &MetricConfig,
) -> Result<f64, MetricError> {
    let hyp_tokens = tokens(hyp);
    let ref_tokens = tokens(reference);
    if ref_tokens.is_empty() {
        return Err(MetricError::EmptyReference);
    }
    if hyp_tokens.is_empty() {
        return Ok(0.0);
    }
    let mut product = 1.0_f64;
    let mut orders = 0u32;
    for n in 1..=config.bleu_max_n {
        let (matches, total) = clipped_word_ngrams(&hyp_tokens, &ref_tokens, n);
        if total == 0 {
            continue;
        }
        let smoothed = n > 1 && config.bleu_smoothing == BleuSmoothing::AddOneForHigherOrders;
        let precision = if smoothed {
            (matches + 1) as f64 / (total + 1) as f64
        } else {
            matches as f64 / total as f64
        };
        product *= precision;
        orders += 1;
    }
    let ratio = (hyp_tokens.len() as f64 / ref_tokens.len() as f64).min(1.0);
    Ok(100.0 * ratio * product.powf(1.0 / f64::from(orders)))
}

/// Unigram BLEU: max_n = 1, no smoothing.
pub fn bleu_1(hyp: &str, reference: &str) -> Result<f64, MetricError> {
    let config = MetricConfig {
        bleu_max_n: 1,
        bleu_smoothing: BleuSmoothing::None,
        ..MetricConfig::default()
    };
    sentence_bleu(hyp, reference, &config)
}

/// Character n-gram F-score with recall weighted `chrf_beta` times more
/// than precision, averaged over the orders for which the reference has
/// at least one n-gram.
pub fn chrf(hyp: &str, reference: &str, config: &MetricConfig) -> Result<f64, MetricError> {
    let keep = |text: &str| -> Vec<char> {
        text.chars()
            .filter(|c| !(config.chrf_ignore_whitespace && c.is_whitespace()))
            .collect()
    };
    let hyp_chars = keep(hyp);
    let ref_chars = keep(reference);
    if ref_chars.is_empty() {
        return Err(MetricError::EmptyReference);
    }
    let beta_sq = config.chrf_beta * config.chrf_beta;
    let mut sum = 0.0;
    let mut orders = 0u32;
    for n in 1..=config.chrf_max_n {
        if ref_chars.len() < n {
            continue;
        }
        orders += 1;
        let ref_total = ref_chars.len() - n + 1;
        let mut ref_counts: HashMap<&[char], usize> = HashMap::new();
        for gram in ref_chars.windows(n) {
            *ref_counts.entry(gram).or_insert(0) += 1;
        }
        let (mut matches, mut hyp_total) = (0usize, 0usize);
        if hyp_chars.len() >= n {
            hyp_total = hyp_chars.len() - n + 1;
            for gram in hyp_chars.windows(n) {
                if let Some(count) = ref_counts.get_mut(gram) {
                    if *count > 0 {
                        *count -= 1;
                        matches += 1;
                    }
                }
            }
        }
        let precision = if hyp_total == 0 {
            0.0
        } else {
            matches as f64 / hyp_total as f64
        };
        let recall = matches as f64 / ref_total as f64;
        let denominator = beta_sq * precision + recall;
        if denominator > 0.0 {
            sum += (1.0 + beta_sq) * precision * recall / denominator;
        }
    }
    Ok(100.0 * sum / f64::from(orders))
}

/// Exact-match METEOR: greedy leftmost unigram alignment (each token
/// matched at most once), alpha-weighted harmonic F-mean, and the chunk
/// fragmentation penalty `gamma * (chunks/matches)^beta`.
pub fn meteor_exact(hyp: &str, reference: &str, config: &MetricConfig) -> Result<f64, MetricError> {
    let hyp_tokens = tokens(hyp);
    let ref_tokens = tokens(reference);
    if ref_tokens.is_empty() {
        return Err(MetricError::EmptyReference);
    }
    if hyp_tokens.is_empty() {
        return Ok(0.0);
    }
    // Index reference tokens for leftmost-first consumption.
    let mut ref_positions: HashMap<&str, Vec<usize>> = HashMap::new();
    for (j, token) in ref_tokens.iter().enumerate().rev() {
        ref_positions.entry(token).or_default().push(j);
    }
    let mut alignment: Vec<(usize, usize)> = Vec::new();
    for (i, token) in hyp_tokens.iter().enumerate() {
        if let Some(positions) = ref_positions.get_mut(token) {
            if let Some(j) = positions.pop() {
                alignment.push((i, j));
            }
        }
    }
    let m = alignment.len();
    if m == 0 {
        return Ok(0.0);
    }
    let precision = m as f64 / hyp_tokens.len() as f64;
    let recall = m as f64 / ref_tokens.len() as f64;
    let fmean = precision * recall
        / (config.meteor_alpha * precision + (1.0 - config.meteor_alpha) * recall);
    let chunks = alignment
        .windows(2)
        .filter(|w| w[0].0 + 1 != w[1].0 || w[0].1 + 1 != w[1].1)
        .count()
        + 1;
    let penalty =
        config.meteor_penalty_gamma * (chunks as f64 / m as f64).powf(config.meteor_penalty_beta);
    Ok(100.0 * fmean * (1.0 - penalty))
}

/// All four metrics for one sentence.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SentenceScores {
    pub bleu: f64,
    pub bleu1: f64,
    pub meteor: f64,
    pub chrf: f64,
}

/// Per-sentence scores plus their unweighted corpus means.
#[derive(Debug, Clone)]
pub struct ScoreReport {
    pub per_sentence: Vec<SentenceScores>,
    pub corpus: SentenceScores,
    pub count: usize,
}

/// Scores every record and averages. The corpus value of each metric is
/// exactly the arithmetic mean of its per-sentence values.
pub fn score_corpus(
    records: &[EvalRecord],
    config: &MetricConfig,
) -> Result<ScoreReport, MetricError> {
    let mut per_sentence = Vec::with_capacity(records.len());
    for (idx, record) in records.iter().enumerate() {
        let at = |e| match e {
            MetricError::EmptyReference => MetricError::EmptyReferenceAt { record: idx + 1 },
            other => other,
        };
        per_sentence.push(SentenceScores {
            bleu: sentence_bleu(&record.hypothesis, &record.reference, config).map_err(at)?,
            bleu1: bleu_1(&record.hypothesis, &record.reference).map_err(at)?,
            meteor: meteor_exact(&record.hypothesis, &record.reference, config).map_err(at)?,
            chrf: chrf(&record.hypothesis, &record.reference, config).map_err(at)?,
        });
    }
    let count = per_sentence.len();
    let mean = |pick: fn(&SentenceScores) -> f64| -> f64 {
        if count == 0 {
            0.0
        } else {
            per_sentence.iter().map(pick).sum::<f64>() / count as f64
        }
    };
    Ok(ScoreReport {
        corpus: SentenceScores {
            bleu: mean(|s| s.bleu),
            bleu1: mean(|s| s.bleu1),
            meteor: mean(|s| s.meteor),
            chrf: mean(|s| s.chrf),
        },
        per_sentence,
        count,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyRow {
    pub property_label: String,
    pub avg_meteor: f64,
    pub appearances: usize,
}

/// Properties ranked by average METEOR, descending (ties broken by
/// label).
#[derive(Debug, Clone)]
pub struct PropertyReport {
    pub rows: Vec<PropertyRow>,
}

/// Groups records by their property label and ranks the groups by mean
/// METEOR. Records without a property label are ignored; if none carries
/// one the input is unusable and an error is returned.
pub fn score_by_property(
    records: &[EvalRecord],
    config: &MetricConfig,
) -> Result<PropertyReport, MetricError> {
    let mut order: Vec<&str> = Vec::new();
    let mut groups: HashMap<&str, (f64, usize)> = HashMap::new();
    for (idx, record) in records.iter().enumerate() {
        if record.property_label.is_empty() {
            continue;
        }
        let score =
            meteor_exact(&record.hypothesis, &record.reference, config).map_err(|e| match e {
                MetricError::EmptyReference => MetricError::EmptyReferenceAt { record: idx + 1 },
                other => other,
            })?;
        let entry = groups.entry(&record.property_label).or_insert_with(|| {
            order.push(&record.property_label);
            (0.0, 0)
        });
        entry.0 += score;
        entry.1 += 1;
    }
    if order.is_empty() {
        return Err(MetricError::NoPropertyMetadata);
    }
    let mut rows: Vec<PropertyRow> = order
        .into_iter()
        .map(|label| {
            let (sum, n) = groups[label];
            PropertyRow {
                property_label: label.to_string(),
                avg_meteor: sum / n as f64,
                appearances: n,
            }
        })
        .collect();
    rows.sort_by(|a, b| {
        b.avg_meteor
            .total_cmp(&a.avg_meteor)
            .then_with(|| a.property_label.cmp(&b.property_label))
    });
    Ok(PropertyReport { rows })
}
