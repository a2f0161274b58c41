//! Per-group metrics and cross-group disparity aggregates.
//!
//! ```bash
//! cargo run --example group_disparities
//! ```

use std::collections::HashMap;

use fairmon::group::{
    aggregate_over_groups, demographic_parity, equalized_odds, metric_by_group, GroupMetric,
    SensitiveFeatureSpec,
};
use fairmon::metrics::PredictionRecord;
use fairmon::rng::SplitMix64;

fn main() {
    // Synthetic cohort where one group gets slightly noisier scores.
    let mut rng = SplitMix64::new(2024);
    let mut records = Vec::new();
    for i in 0..2000 {
        let sex = if rng.bernoulli(0.45) { "Female" } else { "Non-Female" };
        let died = rng.bernoulli(0.08);
        let noise_sd = if sex == "Female" { 0.22 } else { 0.18 };
        let base = if died { 0.55 } else { 0.12 };
        let score = (base + noise_sd * rng.next_standard_normal()).clamp(0.0, 1.0);
        let features = HashMap::from([("catSex".to_owned(), sex.to_owned())]);
        records.push(PredictionRecord::new(format!("stay{i}"), score, died, features).unwrap());
    }

    let spec = SensitiveFeatureSpec::from_records("catSex", &records).unwrap();
    let threshold = 0.3;

    let aurocs = metric_by_group(&records, &spec, GroupMetric::Auroc, None).unwrap();
    println!("auROC by group:");
    for lv in &aurocs.levels {
        println!(
            "  {:<12} {:?} (n={})",
            lv.level,
            lv.value,
            lv.group_size.unwrap()
        );
    }
    let agg = aggregate_over_groups(&aurocs).unwrap();
    println!(
        "auROC over groups: min {:.4}, max {:.4}, difference {:.4}, ratio {:.4}",
        agg.min, agg.max, agg.difference, agg.ratio
    );

    let rates = metric_by_group(&records, &spec, GroupMetric::SelectionRate, Some(threshold)).unwrap();
    let dp = demographic_parity(&rates).unwrap();
    println!(
        "demographic parity: difference {:.4}, ratio {:.4}",
        dp.difference, dp.ratio
    );

    let tprs = metric_by_group(&records, &spec, GroupMetric::TruePositiveRate, Some(threshold)).unwrap();
    let fprs = metric_by_group(&records, &spec, GroupMetric::FalsePositiveRate, Some(threshold)).unwrap();
    let eo = equalized_odds(&tprs, &fprs).unwrap();
    println!(
        "equalized odds: difference {:.4}, ratio {:.4} (1.0 would be perfectly even)",
        eo.difference, eo.ratio
    );
}
