//! Assembly and serialization of the fairness-metric schema.
//!
//! A report is an overall block followed by one block per sensitive
//! feature. Each feature block carries eight cross-group aggregate rows and
//! then, metric by metric, one row per feature level. The report is sized
//! dynamically: `7 + sum over features of (8 + 4 * levels)` rows.

use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::group::{
    aggregate_over_groups, demographic_parity, equalized_odds, metric_by_group, GroupMetric,
    GroupMetricMap, SensitiveFeatureSpec,
};
use crate::metrics::{
    auroc, check_unit_interval, classification_rates, confusion_counts, mean_prediction,
    selection_rate, PredictionRecord,
};

/// A metric value that may be undefined. Undefined values are rendered as
/// the literal string `undefined`, never dropped and never NaN.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MetricValue {
    Real(f64),
    Undefined,
}

impl MetricValue {
    fn from_option(value: Option<f64>) -> Self {
        match value {
            Some(v) => MetricValue::Real(v),
            None => MetricValue::Undefined,
        }
    }

    pub fn as_real(&self) -> Option<f64> {
        match self {
            MetricValue::Real(v) => Some(*v),
            MetricValue::Undefined => None,
        }
    }
}

impl Serialize for MetricValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            MetricValue::Real(v) => serializer.serialize_f64(*v),
            MetricValue::Undefined => serializer.serialize_str("undefined"),
        }
    }
}

impl<'de> Deserialize<'de> for MetricValue {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct MetricValueVisitor;
        impl Visitor<'_> for MetricValueVisitor {
            type Value = MetricValue;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number or the string \"undefined\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<MetricValue, E> {
                Ok(MetricValue::Real(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<MetricValue, E> {
                Ok(MetricValue::Real(v as f64))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<MetricValue, E> {
                Ok(MetricValue::Real(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<MetricValue, E> {
                if v == "undefined" {
                    Ok(MetricValue::Undefined)
                } else {
                    Err(E::invalid_value(de::Unexpected::Str(v), &self))
                }
            }
        }
        deserializer.deserialize_any(MetricValueVisitor)
    }
}

/// One row of the schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub metric: String,
    pub value: MetricValue,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sensitive_feature: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub feature_level: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub group_size: Option<u64>,
}

/// The assembled report: ordered rows plus provenance metadata.
///
/// `generated_at` is carried only in the JSON rendering and can be stripped
/// for reproducible output; the CSV rendering never includes it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemaReport {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub generated_at: Option<String>,
    pub input_digest: String,
    pub rows: Vec<MetricRow>,
}

impl SchemaReport {
    /// Drop the timestamp so repeated runs serialize byte-identically.
    pub fn without_timestamp(mut self) -> Self {
        self.generated_at = None;
        self
    }
}

/// Output format for [`serialize_schema`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

/// Closed-form row count of a report over features with the given level
/// counts: `7 + sum(8 + 4 * levels)`.
pub fn expected_row_count(level_counts: &[usize]) -> usize {
    7 + level_counts.iter().map(|l| 8 + 4 * l).sum::<usize>()
}

const OVERALL_METRICS: [&str; 7] = [
    "area under ROC",
    "selection rate",
    "mean prediction",
    "false negative rate",
    "false positive rate",
    "true negative rate",
    "true positive rate",
];

fn overall_row(metric: &str, value: MetricValue, threshold: Option<f64>) -> MetricRow {
    MetricRow {
        metric: metric.to_owned(),
        value,
        sensitive_feature: None,
        feature_level: None,
        threshold,
        group_size: None,
    }
}

fn aggregate_row(
    metric: &str,
    value: MetricValue,
    feature: &str,
    threshold: Option<f64>,
) -> MetricRow {
    MetricRow {
        metric: metric.to_owned(),
        value,
        sensitive_feature: Some(feature.to_owned()),
        feature_level: None,
        threshold,
        group_size: None,
    }
}

fn by_group_rows(metric: &str, map: &GroupMetricMap, threshold: Option<f64>) -> Vec<MetricRow> {
    map.levels
        .iter()
        .map(|lv| MetricRow {
            metric: metric.to_owned(),
            value: MetricValue::from_option(lv.value),
            sensitive_feature: Some(map.feature.clone()),
            feature_level: Some(lv.level.clone()),
            threshold,
            group_size: lv.group_size.map(|s| s as u64),
        })
        .collect()
}

/// Build the full report for `records` over `specs` at `threshold`.
///
/// `specs` may be empty, in which case only the seven overall rows are
/// emitted. Metrics that are undefined on the data (for example auROC when
/// only one outcome class is present) are rendered as `undefined` rows
/// rather than failing the report.
pub fn build_schema(
    records: &[PredictionRecord],
    specs: &[SensitiveFeatureSpec],
    threshold: f64,
) -> Result<SchemaReport> {
    if records.is_empty() {
        return Err(Error::EmptyInput {
            what: "build_schema needs at least one record",
        });
    }
    check_unit_interval("threshold", threshold)?;

    let mut rows = Vec::with_capacity(expected_row_count(
        &specs.iter().map(|s| s.levels.len()).collect::<Vec<_>>(),
    ));

    // Overall block.
    let overall_auroc = match auroc(records) {
        Ok(v) => MetricValue::Real(v),
        Err(Error::SingleClass) => MetricValue::Undefined,
        Err(e) => return Err(e),
    };
    let rates = classification_rates(&confusion_counts(records, threshold)?);
    rows.push(overall_row(OVERALL_METRICS[0], overall_auroc, None));
    rows.push(overall_row(
        OVERALL_METRICS[1],
        MetricValue::Real(selection_rate(records, threshold)?),
        Some(threshold),
    ));
    rows.push(overall_row(
        OVERALL_METRICS[2],
        MetricValue::Real(mean_prediction(records)?),
        None,
    ));
    for (metric, value) in [
        (OVERALL_METRICS[3], rates.fnr),
        (OVERALL_METRICS[4], rates.fpr),
        (OVERALL_METRICS[5], rates.tnr),
        (OVERALL_METRICS[6], rates.tpr),
    ] {
        rows.push(overall_row(
            metric,
            MetricValue::from_option(value),
            Some(threshold),
        ));
    }

    // One block per sensitive feature.
    for spec in specs {
        rows.extend(feature_block(records, spec, threshold)?);
    }

    Ok(SchemaReport {
        generated_at: Some(chrono::Utc::now().to_rfc3339()),
        input_digest: records_digest(records),
        rows,
    })
}

fn feature_block(
    records: &[PredictionRecord],
    spec: &SensitiveFeatureSpec,
    threshold: f64,
) -> Result<Vec<MetricRow>> {
    let auroc_map = metric_by_group(records, spec, GroupMetric::Auroc, None)?;
    let tpr_map = metric_by_group(records, spec, GroupMetric::TruePositiveRate, Some(threshold))?;
    let fpr_map = metric_by_group(
        records,
        spec,
        GroupMetric::FalsePositiveRate,
        Some(threshold),
    )?;
    let selection_map =
        metric_by_group(records, spec, GroupMetric::SelectionRate, Some(threshold))?;

    let feature = spec.name.as_str();
    let mut rows = Vec::with_capacity(8 + 4 * spec.levels.len());

    // Cross-group aggregates. All-undefined aggregates are rendered as
    // undefined rows instead of aborting the report.
    let (auroc_min, auroc_max, auroc_diff, auroc_ratio) = match aggregate_over_groups(&auroc_map) {
        Ok(agg) => (
            MetricValue::Real(agg.min),
            MetricValue::Real(agg.max),
            MetricValue::Real(agg.difference),
            MetricValue::Real(agg.ratio),
        ),
        Err(Error::UndefinedAggregate { .. }) => (
            MetricValue::Undefined,
            MetricValue::Undefined,
            MetricValue::Undefined,
            MetricValue::Undefined,
        ),
        Err(e) => return Err(e),
    };
    rows.push(aggregate_row("min auROC over groups", auroc_min, feature, None));
    rows.push(aggregate_row("max auROC over groups", auroc_max, feature, None));
    rows.push(aggregate_row("difference in auROC", auroc_diff, feature, None));
    rows.push(aggregate_row("ratio in auROC", auroc_ratio, feature, None));

    let (dp_ratio, dp_diff) = match demographic_parity(&selection_map) {
        Ok(dp) => (MetricValue::Real(dp.ratio), MetricValue::Real(dp.difference)),
        Err(Error::UndefinedAggregate { .. }) => (MetricValue::Undefined, MetricValue::Undefined),
        Err(e) => return Err(e),
    };
    rows.push(aggregate_row(
        "demographic parity ratio",
        dp_ratio,
        feature,
        Some(threshold),
    ));
    rows.push(aggregate_row(
        "demographic parity difference",
        dp_diff,
        feature,
        Some(threshold),
    ));

    let (eo_diff, eo_ratio) = match equalized_odds(&tpr_map, &fpr_map) {
        Ok(eo) => (MetricValue::Real(eo.difference), MetricValue::Real(eo.ratio)),
        Err(Error::UndefinedAggregate { .. }) => (MetricValue::Undefined, MetricValue::Undefined),
        Err(e) => return Err(e),
    };
    rows.push(aggregate_row(
        "equalized odds difference",
        eo_diff,
        feature,
        Some(threshold),
    ));
    rows.push(aggregate_row(
        "equalized odds ratio",
        eo_ratio,
        feature,
        Some(threshold),
    ));

    // Per-level rows, grouped metric by metric.
    rows.extend(by_group_rows("auROC by group", &auroc_map, None));
    rows.extend(by_group_rows(
        "true positive rate by group",
        &tpr_map,
        Some(threshold),
    ));
    rows.extend(by_group_rows(
        "false positive rate by group",
        &fpr_map,
        Some(threshold),
    ));
    rows.extend(by_group_rows(
        "selection rate by group",
        &selection_map,
        Some(threshold),
    ));

    Ok(rows)
}

/// Content hash of the records themselves, used when the report is built
/// from in-memory data. CLI entry points replace it with the hash of the
/// input file bytes.
fn records_digest(records: &[PredictionRecord]) -> String {
    let mut hasher = Sha256::new();
    for record in records {
        hasher.update(record.stay_id.as_bytes());
        hasher.update([0]);
        hasher.update(record.score.to_bits().to_le_bytes());
        hasher.update([u8::from(record.outcome)]);
        let mut features: Vec<(&str, &str)> = record
            .features
            .iter()
            .map(|(k, v)| (k.as_str(), v.as_str()))
            .collect();
        features.sort_unstable();
        for (name, level) in features {
            hasher.update(name.as_bytes());
            hasher.update([1]);
            hasher.update(level.as_bytes());
            hasher.update([2]);
        }
        hasher.update([3]);
    }
    format!("sha256:{:x}", hasher.finalize())
}

/// Render a metric value with nine decimal places, matching the precision
/// reference tables are published at.
pub fn format_value(value: &MetricValue) -> String {
    match value {
        MetricValue::Real(v) => format!("{v:.9}"),
        MetricValue::Undefined => "undefined".to_owned(),
    }
}

fn csv_field(raw: &str) -> String {
    if raw.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw.to_owned()
    }
}

/// Serialize the report.
///
/// CSV: header `metric,value,sensitive_feature,feature_level,threshold,group_size`,
/// values with nine decimal places, `undefined` printed literally, absent
/// optionals as empty fields. JSON: an object with the report metadata and a
/// `rows` array using the same field names, absent optionals omitted.
pub fn serialize_schema(report: &SchemaReport, format: ReportFormat) -> Result<Vec<u8>> {
    match format {
        ReportFormat::Csv => {
            let mut out = String::new();
            out.push_str("metric,value,sensitive_feature,feature_level,threshold,group_size\n");
            for row in &report.rows {
                out.push_str(&csv_field(&row.metric));
                out.push(',');
                out.push_str(&format_value(&row.value));
                out.push(',');
                out.push_str(&csv_field(row.sensitive_feature.as_deref().unwrap_or("")));
                out.push(',');
                out.push_str(&csv_field(row.feature_level.as_deref().unwrap_or("")));
                out.push(',');
                if let Some(t) = row.threshold {
                    out.push_str(&t.to_string());
                }
                out.push(',');
                if let Some(s) = row.group_size {
                    out.push_str(&s.to_string());
                }
                out.push('\n');
            }
            Ok(out.into_bytes())
        }
        ReportFormat::Json => {
            let mut bytes = serde_json::to_vec_pretty(report)?;
            bytes.push(b'\n');
            Ok(bytes)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::PredictionRecord;
    use crate::rng::SplitMix64;
    use proptest::prelude::*;
    use std::collections::HashMap;

    fn cohort(levels_per_feature: &[(&str, &[&str])], n: usize, seed: u64) -> Vec<PredictionRecord> {
        let mut rng = SplitMix64::new(seed);
        (0..n)
            .map(|i| {
                let mut features = HashMap::new();
                for (name, levels) in levels_per_feature {
                    let level = levels[rng.next_index(levels.len())];
                    features.insert((*name).to_owned(), level.to_owned());
                }
                PredictionRecord::new(
                    format!("s{i}"),
                    rng.next_f64(),
                    rng.bernoulli(0.3),
                    features,
                )
                .unwrap()
            })
            .collect()
    }

    fn specs_for(records: &[PredictionRecord], names: &[&str]) -> Vec<SensitiveFeatureSpec> {
        names
            .iter()
            .map(|n| SensitiveFeatureSpec::from_records(n, records).unwrap())
            .collect()
    }

    #[test]
    fn two_feature_report_has_55_rows_in_block_order() {
        let records = cohort(
            &[
                ("catSex", &["Female", "Non-Female"]),
                (
                    "race",
                    &[
                        "African American",
                        "Asian",
                        "Caucasian",
                        "Hispanic",
                        "Native American",
                        "Other/Unknown",
                    ],
                ),
            ],
            400,
            7,
        );
        let specs = specs_for(&records, &["catSex", "race"]);
        let report = build_schema(&records, &specs, 0.05).unwrap();
        assert_eq!(report.rows.len(), 55);
        assert_eq!(report.rows.len(), expected_row_count(&[2, 6]));

        let names: Vec<&str> = report.rows.iter().map(|r| r.metric.as_str()).collect();
        assert_eq!(
            &names[..7],
            &[
                "area under ROC",
                "selection rate",
                "mean prediction",
                "false negative rate",
                "false positive rate",
                "true negative rate",
                "true positive rate",
            ]
        );
        let block = &[
            "min auROC over groups",
            "max auROC over groups",
            "difference in auROC",
            "ratio in auROC",
            "demographic parity ratio",
            "demographic parity difference",
            "equalized odds difference",
            "equalized odds ratio",
        ];
        assert_eq!(&names[7..15], block);
        // catSex per-level rows come metric-major: two rows per metric.
        assert_eq!(names[15], "auROC by group");
        assert_eq!(names[16], "auROC by group");
        assert_eq!(names[17], "true positive rate by group");
        assert_eq!(names[19], "false positive rate by group");
        assert_eq!(names[21], "selection rate by group");
        // race block starts after the 16-row catSex block.
        assert_eq!(&names[23..31], block);
        assert!(report.rows[7..23]
            .iter()
            .all(|r| r.sensitive_feature.as_deref() == Some("catSex")));
        assert!(report.rows[23..]
            .iter()
            .all(|r| r.sensitive_feature.as_deref() == Some("race")));
    }

    #[test]
    fn empty_spec_list_yields_overall_block_only() {
        let records = cohort(&[], 50, 11);
        let report = build_schema(&records, &[], 0.05).unwrap();
        assert_eq!(report.rows.len(), 7);
        assert!(report.rows.iter().all(|r| r.sensitive_feature.is_none()));
    }

    #[test]
    fn three_level_feature_matches_filter_then_recompute() {
        let records = cohort(&[("GCS3", &["highGCS3", "medGCS3", "lowGCS3"])], 300, 13);
        let specs = specs_for(&records, &["GCS3"]);
        let report = build_schema(&records, &specs, 0.05).unwrap();
        assert_eq!(report.rows.len(), 27);

        for row in &report.rows {
            let Some(level) = row.feature_level.as_deref() else {
                continue;
            };
            let subset: Vec<PredictionRecord> = records
                .iter()
                .filter(|r| r.feature("GCS3") == Some(level))
                .cloned()
                .collect();
            let expected = match row.metric.as_str() {
                "auROC by group" => auroc(&subset).ok(),
                "true positive rate by group" => {
                    classification_rates(&confusion_counts(&subset, 0.05).unwrap()).tpr
                }
                "false positive rate by group" => {
                    classification_rates(&confusion_counts(&subset, 0.05).unwrap()).fpr
                }
                "selection rate by group" => Some(selection_rate(&subset, 0.05).unwrap()),
                other => panic!("unexpected per-level metric {other}"),
            };
            assert_eq!(row.value.as_real(), expected, "row {row:?}");
            assert_eq!(row.group_size, Some(subset.len() as u64));
        }
    }

    #[test]
    fn aggregate_rows_are_consistent_with_group_rows() {
        let records = cohort(&[("g", &["a", "b", "c", "d"])], 250, 17);
        let specs = specs_for(&records, &["g"]);
        let report = build_schema(&records, &specs, 0.1).unwrap();

        let group_values = |metric: &str| -> Vec<f64> {
            report
                .rows
                .iter()
                .filter(|r| r.metric == metric)
                .filter_map(|r| r.value.as_real())
                .collect()
        };
        let agg_value = |metric: &str| -> f64 {
            report
                .rows
                .iter()
                .find(|r| r.metric == metric)
                .and_then(|r| r.value.as_real())
                .unwrap()
        };

        let aurocs = group_values("auROC by group");
        let min = aurocs.iter().copied().fold(f64::INFINITY, f64::min);
        let max = aurocs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        assert!((agg_value("min auROC over groups") - min).abs() < 1e-12);
        assert!((agg_value("max auROC over groups") - max).abs() < 1e-12);
        assert!((agg_value("difference in auROC") - (max - min)).abs() < 1e-12);
        assert!((agg_value("ratio in auROC") - min / max).abs() < 1e-12);

        let rates = group_values("selection rate by group");
        let min_rate = rates.iter().copied().fold(f64::INFINITY, f64::min);
        let max_rate = rates.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        assert!(
            (agg_value("demographic parity difference") - (max_rate - min_rate)).abs() < 1e-12
        );
    }

    #[test]
    fn single_class_data_renders_undefined_rows() {
        let mut records = cohort(&[("g", &["a", "b"])], 40, 19);
        for r in &mut records {
            r.outcome = false;
        }
        let specs = specs_for(&records, &["g"]);
        let report = build_schema(&records, &specs, 0.05).unwrap();
        let row = |metric: &str| {
            report
                .rows
                .iter()
                .find(|r| r.metric == metric)
                .unwrap()
                .value
        };
        assert_eq!(row("area under ROC"), MetricValue::Undefined);
        assert_eq!(row("true positive rate"), MetricValue::Undefined);
        assert_eq!(row("min auROC over groups"), MetricValue::Undefined);
        assert_eq!(row("equalized odds ratio"), MetricValue::Undefined);
        // Selection rate stays defined regardless of outcomes.
        assert!(row("selection rate").as_real().is_some());
        assert_eq!(report.rows.len(), expected_row_count(&[2]));
    }

    #[test]
    fn csv_has_header_and_one_line_per_row() {
        let records = cohort(
            &[
                ("catSex", &["Female", "Non-Female"]),
                ("race", &["a", "b", "c", "d", "e", "f"]),
            ],
            300,
            23,
        );
        let specs = specs_for(&records, &["catSex", "race"]);
        let report = build_schema(&records, &specs, 0.05).unwrap();
        let bytes = serialize_schema(&report, ReportFormat::Csv).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 56);
        assert_eq!(
            lines[0],
            "metric,value,sensitive_feature,feature_level,threshold,group_size"
        );
        // Overall auROC row leaves every optional field empty.
        assert!(lines[1].starts_with("area under ROC,0."));
        assert!(lines[1].ends_with(",,,,"));
    }

    #[test]
    fn csv_values_carry_nine_decimals() {
        assert_eq!(format_value(&MetricValue::Real(0.92331276)), "0.923312760");
        assert_eq!(format_value(&MetricValue::Real(1.0)), "1.000000000");
        assert_eq!(format_value(&MetricValue::Undefined), "undefined");
    }

    #[test]
    fn csv_serialization_is_deterministic() {
        let records = cohort(&[("g", &["a", "b"])], 80, 29);
        let specs = specs_for(&records, &["g"]);
        let a = build_schema(&records, &specs, 0.05).unwrap();
        let b = build_schema(&records, &specs, 0.05).unwrap();
        assert_eq!(
            serialize_schema(&a, ReportFormat::Csv).unwrap(),
            serialize_schema(&b, ReportFormat::Csv).unwrap()
        );
        assert_eq!(a.input_digest, b.input_digest);
        // JSON differs only through the timestamp; stripped reports match.
        assert_eq!(
            serialize_schema(&a.clone().without_timestamp(), ReportFormat::Json).unwrap(),
            serialize_schema(&b.clone().without_timestamp(), ReportFormat::Json).unwrap()
        );
    }

    #[test]
    fn json_round_trips_to_identical_rows() {
        let records = cohort(&[("g", &["a", "b", "c"])], 120, 31);
        let specs = specs_for(&records, &["g"]);
        let report = build_schema(&records, &specs, 0.05).unwrap();
        let bytes = serialize_schema(&report, ReportFormat::Json).unwrap();
        let parsed: SchemaReport = serde_json::from_slice(&bytes).unwrap();
        assert_eq!(parsed.rows, report.rows);
        assert_eq!(parsed.input_digest, report.input_digest);
    }

    #[test]
    fn empty_records_error() {
        assert!(matches!(
            build_schema(&[], &[], 0.05),
            Err(Error::EmptyInput { .. })
        ));
    }

    proptest! {
        #[test]
        fn row_count_formula_holds_for_random_configurations(
            level_counts in proptest::collection::vec(1usize..=10, 0..4),
            seed in 0u64..1000,
        ) {
            let features: Vec<(String, Vec<String>)> = level_counts
                .iter()
                .enumerate()
                .map(|(i, n)| {
                    (
                        format!("f{i}"),
                        (0..*n).map(|l| format!("level{l}")).collect(),
                    )
                })
                .collect();
            let borrowed: Vec<(&str, Vec<&str>)> = features
                .iter()
                .map(|(n, ls)| (n.as_str(), ls.iter().map(String::as_str).collect()))
                .collect();
            let mut rng = SplitMix64::new(seed);
            // Ensure every level appears so specs carry the full level sets.
            let mut records = Vec::new();
            let max_levels = level_counts.iter().copied().max().unwrap_or(1);
            let n = 40 + max_levels * 4;
            for i in 0..n {
                let mut feats = HashMap::new();
                for (name, levels) in &borrowed {
                    let idx = if i < max_levels {
                        i % levels.len()
                    } else {
                        rng.next_index(levels.len())
                    };
                    feats.insert((*name).to_owned(), levels[idx].to_owned());
                }
                records.push(
                    PredictionRecord::new(
                        format!("s{i}"),
                        rng.next_f64(),
                        rng.bernoulli(0.4),
                        feats,
                    )
                    .unwrap(),
                );
            }
            let specs: Vec<SensitiveFeatureSpec> = features
                .iter()
                .map(|(name, levels)| {
                    SensitiveFeatureSpec::new(name.clone(), levels.clone()).unwrap()
                })
                .collect();
            let report = build_schema(&records, &specs, 0.05).unwrap();
            prop_assert_eq!(report.rows.len(), expected_row_count(&level_counts));
        }
    }
}
