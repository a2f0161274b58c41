//! Overall accuracy metrics on a small scored cohort.
//!
//! ```bash
//! cargo run --example overall_metrics
//! ```

use std::collections::HashMap;

use fairmon::metrics::{
    apply_threshold, auroc, classification_rates, confusion_counts, mean_prediction,
    selection_rate, PredictionRecord,
};

fn main() {
    // Ten stays: risk score and whether the patient died.
    let scored = [
        (0.91, true),
        (0.64, true),
        (0.48, false),
        (0.22, true),
        (0.12, false),
        (0.09, false),
        (0.05, false),
        (0.04, false),
        (0.02, false),
        (0.01, false),
    ];
    let records: Vec<PredictionRecord> = scored
        .iter()
        .enumerate()
        .map(|(i, (score, died))| {
            PredictionRecord::new(format!("stay{i:02}"), *score, *died, HashMap::new()).unwrap()
        })
        .collect();

    let threshold = 0.05;
    println!("cohort of {} stays, threshold {threshold}", records.len());
    println!(
        "stay00 predicted positive: {}",
        apply_threshold(records[0].score, threshold).unwrap()
    );

    let counts = confusion_counts(&records, threshold).unwrap();
    println!(
        "confusion: tp={} fp={} tn={} fn={}",
        counts.true_positives, counts.false_positives, counts.true_negatives, counts.false_negatives
    );

    let rates = classification_rates(&counts);
    println!(
        "tpr={:?} fpr={:?} tnr={:?} fnr={:?}",
        rates.tpr, rates.fpr, rates.tnr, rates.fnr
    );

    println!(
        "selection rate = {:.3}",
        selection_rate(&records, threshold).unwrap()
    );
    println!("mean prediction = {:.3}", mean_prediction(&records).unwrap());
    println!("auROC = {:.3}", auroc(&records).unwrap());
}
