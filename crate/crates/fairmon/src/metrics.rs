//! Threshold application, confusion counts, classification rates and auROC
//! for a flat set of prediction records.
//!
//! Every function here is a pure function of its inputs; records may be read
//! from any number of threads concurrently.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// One scored ICU stay: a risk score in `[0, 1]`, the observed binary
/// outcome (`true` = died) and the stay's sensitive-feature values.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionRecord {
    pub stay_id: String,
    pub score: f64,
    pub outcome: bool,
    pub features: HashMap<String, String>,
}

impl PredictionRecord {
    /// Build a record, validating the score range and that every feature
    /// level is a non-empty string.
    pub fn new(
        stay_id: impl Into<String>,
        score: f64,
        outcome: bool,
        features: HashMap<String, String>,
    ) -> Result<Self> {
        check_unit_interval("score", score)?;
        for (name, level) in &features {
            if level.is_empty() {
                return Err(Error::Config(format!(
                    "feature {name:?} has an empty level string"
                )));
            }
        }
        Ok(Self {
            stay_id: stay_id.into(),
            score,
            outcome,
            features,
        })
    }

    pub fn feature(&self, name: &str) -> Option<&str> {
        self.features.get(name).map(String::as_str)
    }
}

/// Confusion-matrix tallies at a fixed decision threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfusionCounts {
    pub true_positives: u64,
    pub false_positives: u64,
    pub true_negatives: u64,
    pub false_negatives: u64,
    pub threshold: f64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.true_positives + self.false_positives + self.true_negatives + self.false_negatives
    }
}

/// Classification rates derived from [`ConfusionCounts`].
///
/// `None` marks an undefined rate (zero denominator). When defined,
/// `tnr == 1.0 - fpr` and `fnr == 1.0 - tpr` hold bit-exactly because the
/// complements are computed as such.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateSet {
    pub tpr: Option<f64>,
    pub fpr: Option<f64>,
    pub tnr: Option<f64>,
    pub fnr: Option<f64>,
}

pub(crate) fn check_unit_interval(what: &'static str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::OutOfRange {
            what,
            lo: 0.0,
            hi: 1.0,
            got: value,
        });
    }
    Ok(())
}

/// Convert a risk score into a binary decision. The boundary is inclusive:
/// `score >= threshold` predicts positive, so a threshold of 0 selects
/// every record.
pub fn apply_threshold(score: f64, threshold: f64) -> Result<bool> {
    check_unit_interval("score", score)?;
    check_unit_interval("threshold", threshold)?;
    Ok(score >= threshold)
}

/// Tally predicted-positive/negative against outcomes at `threshold`.
pub fn confusion_counts<'a, I>(records: I, threshold: f64) -> Result<ConfusionCounts>
where
    I: IntoIterator<Item = &'a PredictionRecord>,
{
    let mut counts = ConfusionCounts {
        true_positives: 0,
        false_positives: 0,
        true_negatives: 0,
        false_negatives: 0,
        threshold,
    };
    let mut seen = false;
    for record in records {
        seen = true;
        let predicted = apply_threshold(record.score, threshold)?;
        match (predicted, record.outcome) {
            (true, true) => counts.true_positives += 1,
            (true, false) => counts.false_positives += 1,
            (false, false) => counts.true_negatives += 1,
            (false, true) => counts.false_negatives += 1,
        }
    }
    if !seen {
        return Err(Error::EmptyInput {
            what: "confusion_counts needs at least one record",
        });
    }
    Ok(counts)
}

/// Derive TPR/FPR/TNR/FNR from confusion counts. A zero denominator yields
/// `None` rather than NaN or an error.
pub fn classification_rates(counts: &ConfusionCounts) -> RateSet {
    let positives = counts.true_positives + counts.false_negatives;
    let negatives = counts.false_positives + counts.true_negatives;
    let tpr = (positives > 0).then(|| counts.true_positives as f64 / positives as f64);
    let fpr = (negatives > 0).then(|| counts.false_positives as f64 / negatives as f64);
    RateSet {
        tpr,
        fpr,
        tnr: fpr.map(|v| 1.0 - v),
        fnr: tpr.map(|v| 1.0 - v),
    }
}

/// Fraction of records predicted positive at `threshold`.
pub fn selection_rate<'a, I>(records: I, threshold: f64) -> Result<f64>
where
    I: IntoIterator<Item = &'a PredictionRecord>,
{
    let mut selected = 0u64;
    let mut total = 0u64;
    for record in records {
        total += 1;
        if apply_threshold(record.score, threshold)? {
            selected += 1;
        }
    }
    if total == 0 {
        return Err(Error::EmptyInput {
            what: "selection_rate needs at least one record",
        });
    }
    Ok(selected as f64 / total as f64)
}

/// Arithmetic mean of the raw scores. No threshold is involved.
pub fn mean_prediction<'a, I>(records: I) -> Result<f64>
where
    I: IntoIterator<Item = &'a PredictionRecord>,
{
    let mut sum = 0.0;
    let mut total = 0u64;
    for record in records {
        sum += record.score;
        total += 1;
    }
    if total == 0 {
        return Err(Error::EmptyInput {
            what: "mean_prediction needs at least one record",
        });
    }
    Ok(sum / total as f64)
}

/// Area under the ROC curve via the midrank Mann-Whitney statistic.
///
/// Equals the probability that a uniformly random positive record outscores
/// a uniformly random negative one, ties counting one half. Requires at
/// least one record of each outcome class.
pub fn auroc<'a, I>(records: I) -> Result<f64>
where
    I: IntoIterator<Item = &'a PredictionRecord>,
{
    let mut scored: Vec<(f64, bool)> = records
        .into_iter()
        .map(|r| (r.score, r.outcome))
        .collect();
    let positives = scored.iter().filter(|(_, died)| *died).count();
    let negatives = scored.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::SingleClass);
    }
    scored.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("scores are never NaN"));

    // Midranks: each run of tied scores shares the mean of its 1-based ranks.
    let mut rank_sum_positive = 0.0f64;
    let mut start = 0;
    while start < scored.len() {
        let mut end = start + 1;
        while end < scored.len() && scored[end].0 == scored[start].0 {
            end += 1;
        }
        let midrank = (start + 1 + end) as f64 / 2.0;
        for item in &scored[start..end] {
            if item.1 {
                rank_sum_positive += midrank;
            }
        }
        start = end;
    }

    let p = positives as f64;
    let n = negatives as f64;
    let u = rank_sum_positive - p * (p + 1.0) / 2.0;
    Ok(u / (p * n))
}
