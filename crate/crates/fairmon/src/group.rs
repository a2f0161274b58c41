//! Partitioning by sensitive feature and cross-group disparity aggregates.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::metrics::{
    auroc, classification_rates, confusion_counts, mean_prediction, selection_rate,
    PredictionRecord,
};

/// A sensitive feature and its ordered level set.
///
/// Level order is first-appearance order in the input stream, which makes
/// downstream reports deterministic for a fixed input file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SensitiveFeatureSpec {
    pub name: String,
    pub levels: Vec<String>,
}

impl SensitiveFeatureSpec {
    pub fn new(name: impl Into<String>, levels: Vec<String>) -> Result<Self> {
        let name = name.into();
        if levels.is_empty() {
            return Err(Error::EmptyInput {
                what: "a sensitive feature needs at least one level",
            });
        }
        let mut seen = HashMap::new();
        for level in &levels {
            if level.is_empty() {
                return Err(Error::Config(format!(
                    "feature {name:?} declares an empty level string"
                )));
            }
            if seen.insert(level.clone(), ()).is_some() {
                return Err(Error::Config(format!(
                    "feature {name:?} declares duplicate level {level:?}"
                )));
            }
        }
        Ok(Self { name, levels })
    }

    /// Collect the level set of `name` from `records` in first-appearance
    /// order. Errors if any record lacks the feature.
    pub fn from_records(name: &str, records: &[PredictionRecord]) -> Result<Self> {
        let mut levels = Vec::new();
        let mut seen = HashMap::new();
        for record in records {
            let level = record.feature(name).ok_or_else(|| Error::MissingFeature {
                stay_id: record.stay_id.clone(),
                feature: name.to_owned(),
            })?;
            if level.is_empty() {
                return Err(Error::Config(format!(
                    "record {:?} has an empty level for feature {name:?}",
                    record.stay_id
                )));
            }
            if seen.insert(level.to_owned(), ()).is_none() {
                levels.push(level.to_owned());
            }
        }
        Self::new(name, levels)
    }
}

/// Metrics that can be evaluated per group.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupMetric {
    Auroc,
    TruePositiveRate,
    FalsePositiveRate,
    SelectionRate,
    MeanPrediction,
}

impl GroupMetric {
    pub fn requires_threshold(self) -> bool {
        matches!(
            self,
            GroupMetric::TruePositiveRate
                | GroupMetric::FalsePositiveRate
                | GroupMetric::SelectionRate
        )
    }
}

impl fmt::Display for GroupMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            GroupMetric::Auroc => "auROC",
            GroupMetric::TruePositiveRate => "true positive rate",
            GroupMetric::FalsePositiveRate => "false positive rate",
            GroupMetric::SelectionRate => "selection rate",
            GroupMetric::MeanPrediction => "mean prediction",
        };
        f.write_str(name)
    }
}

/// One metric evaluated on every level of a sensitive feature.
///
/// `value == None` marks an undefined metric (for example auROC on a
/// single-class group); undefined entries are excluded from aggregates but
/// still appear in reports.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupMetricMap {
    pub metric: GroupMetric,
    pub feature: String,
    pub levels: Vec<LevelValue>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelValue {
    pub level: String,
    pub value: Option<f64>,
    pub group_size: Option<usize>,
}

impl GroupMetricMap {
    /// Assemble a map from raw per-level values, e.g. published rates.
    pub fn from_values(
        metric: GroupMetric,
        feature: impl Into<String>,
        values: Vec<(String, Option<f64>)>,
    ) -> Self {
        Self {
            metric,
            feature: feature.into(),
            levels: values
                .into_iter()
                .map(|(level, value)| LevelValue {
                    level,
                    value,
                    group_size: None,
                })
                .collect(),
        }
    }

    pub fn value(&self, level: &str) -> Option<Option<f64>> {
        self.levels.iter().find(|lv| lv.level == level).map(|lv| lv.value)
    }

    pub fn defined_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.levels.iter().filter_map(|lv| lv.value)
    }

    fn level_names(&self) -> Vec<&str> {
        self.levels.iter().map(|lv| lv.level.as_str()).collect()
    }
}

/// Split records into per-level groups, keyed and ordered by `spec.levels`.
///
/// The partition is disjoint and exhaustive: every record lands in exactly
/// one group, and group sizes sum to the input size. Membership depends only
/// on feature values, never on record order.
pub fn partition_by_feature<'a>(
    records: &'a [PredictionRecord],
    spec: &SensitiveFeatureSpec,
) -> Result<Vec<(String, Vec<&'a PredictionRecord>)>> {
    let index: HashMap<&str, usize> = spec
        .levels
        .iter()
        .enumerate()
        .map(|(i, level)| (level.as_str(), i))
        .collect();
    let mut groups: Vec<Vec<&PredictionRecord>> = vec![Vec::new(); spec.levels.len()];
    for record in records {
        let level = record
            .feature(&spec.name)
            .ok_or_else(|| Error::MissingFeature {
                stay_id: record.stay_id.clone(),
                feature: spec.name.clone(),
            })?;
        let slot = index.get(level).ok_or_else(|| Error::UndeclaredLevel {
            feature: spec.name.clone(),
            level: level.to_owned(),
        })?;
        groups[*slot].push(record);
    }
    Ok(spec.levels.iter().cloned().zip(groups).collect())
}

/// Evaluate `metric` independently on each partition of `records`.
///
/// `threshold` must be supplied exactly when the metric needs one. Groups on
/// which the metric is undefined (single-class auROC, no positives for TPR,
/// no negatives for FPR, empty group) yield `None`.
pub fn metric_by_group(
    records: &[PredictionRecord],
    spec: &SensitiveFeatureSpec,
    metric: GroupMetric,
    threshold: Option<f64>,
) -> Result<GroupMetricMap> {
    match (metric.requires_threshold(), threshold) {
        (true, None) => {
            return Err(Error::Config(format!(
                "metric {metric:?} needs a threshold"
            )))
        }
        (false, Some(_)) => {
            return Err(Error::Config(format!(
                "metric {metric:?} does not take a threshold"
            )))
        }
        _ => {}
    }
    let groups = partition_by_feature(records, spec)?;
    let mut levels = Vec::with_capacity(groups.len());
    for (level, members) in groups {
        let value = if members.is_empty() {
            None
        } else {
            group_value(&members, metric, threshold)?
        };
        levels.push(LevelValue {
            level,
            value,
            group_size: Some(members.len()),
        });
    }
    Ok(GroupMetricMap {
        metric,
        feature: spec.name.clone(),
        levels,
    })
}

fn group_value(
    members: &[&PredictionRecord],
    metric: GroupMetric,
    threshold: Option<f64>,
) -> Result<Option<f64>> {
    let iter = || members.iter().copied();
    match metric {
        GroupMetric::Auroc => match auroc(iter()) {
            Ok(v) => Ok(Some(v)),
            Err(Error::SingleClass) => Ok(None),
            Err(e) => Err(e),
        },
        GroupMetric::TruePositiveRate => {
            let counts = confusion_counts(iter(), threshold.expect("checked above"))?;
            Ok(classification_rates(&counts).tpr)
        }
        GroupMetric::FalsePositiveRate => {
            let counts = confusion_counts(iter(), threshold.expect("checked above"))?;
            Ok(classification_rates(&counts).fpr)
        }
        GroupMetric::SelectionRate => Ok(Some(selection_rate(iter(), threshold.expect("checked above"))?)),
        GroupMetric::MeanPrediction => Ok(Some(mean_prediction(iter())?)),
    }
}

/// Min, max, spread and min/max ratio over the defined values of a group map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupAggregate {
    pub min: f64,
    pub max: f64,
    pub difference: f64,
    pub ratio: f64,
}

/// Aggregate the defined per-level values of `map`.
///
/// `ratio` is min/max with the zero-denominator rule: when max is 0, min is
/// 0 too and the ratio is 1. Errors when every level is undefined.
pub fn aggregate_over_groups(map: &GroupMetricMap) -> Result<GroupAggregate> {
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut any = false;
    for value in map.defined_values() {
        any = true;
        min = min.min(value);
        max = max.max(value);
    }
    if !any {
        return Err(Error::UndefinedAggregate {
            metric: map.metric.to_string(),
        });
    }
    Ok(GroupAggregate {
        min,
        max,
        difference: max - min,
        ratio: if max == 0.0 { 1.0 } else { min / max },
    })
}

/// A difference/ratio pair summarising disparity across groups.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisparitySummary {
    pub difference: f64,
    pub ratio: f64,
}

/// Demographic parity over per-group selection rates: difference is the
/// highest minus the lowest rate, ratio is lowest over highest.
pub fn demographic_parity(selection_rates: &GroupMetricMap) -> Result<DisparitySummary> {
    let agg = aggregate_over_groups(selection_rates)?;
    Ok(DisparitySummary {
        difference: agg.difference,
        ratio: agg.ratio,
    })
}

/// Equalized odds over per-group TPRs and FPRs.
///
/// The difference is the larger of the TPR spread and the FPR spread; the
/// ratio is the smaller of the two min/max ratios. Undefined group values
/// are excluded on both sides.
pub fn equalized_odds(
    tprs: &GroupMetricMap,
    fprs: &GroupMetricMap,
) -> Result<DisparitySummary> {
    if tprs.level_names() != fprs.level_names() {
        return Err(Error::Config(format!(
            "equalized odds needs matching level sets, got {:?} vs {:?}",
            tprs.level_names(),
            fprs.level_names()
        )));
    }
    let tpr_agg = aggregate_over_groups(tprs)?;
    let fpr_agg = aggregate_over_groups(fprs)?;
    Ok(DisparitySummary {
        difference: tpr_agg.difference.max(fpr_agg.difference),
        ratio: tpr_agg.ratio.min(fpr_agg.ratio),
    })
}
