//! Assemble the dynamically sized fairness schema and print it as CSV.
//!
//! The report holds 7 overall rows plus, per sensitive feature, 8 aggregate
//! rows and 4 rows per level: here 7 + (8 + 4*2) + (8 + 4*3) = 43 rows.
//!
//! ```bash
//! cargo run --example fairness_schema
//! ```

use std::collections::HashMap;

use fairmon::group::SensitiveFeatureSpec;
use fairmon::metrics::PredictionRecord;
use fairmon::rng::SplitMix64;
use fairmon::schema::{build_schema, serialize_schema, ReportFormat};

fn main() {
    let mut rng = SplitMix64::new(99);
    let sexes = ["Female", "Non-Female"];
    let dx_groups = ["CardiacArrest", "DKA", "Other"];
    let mut records = Vec::new();
    for i in 0..1500 {
        let sex = sexes[rng.next_index(sexes.len())];
        let dx = dx_groups[rng.next_index(dx_groups.len())];
        let acuity = match dx {
            "CardiacArrest" => 0.45,
            "DKA" => 0.02,
            _ => 0.10,
        };
        let died = rng.bernoulli(acuity);
        let base = if died { 0.35 } else { 0.02 };
        let score = (base + 0.08 * rng.next_standard_normal()).clamp(0.0, 1.0);
        let features = HashMap::from([
            ("catSex".to_owned(), sex.to_owned()),
            ("dxGroup".to_owned(), dx.to_owned()),
        ]);
        records.push(PredictionRecord::new(format!("stay{i}"), score, died, features).unwrap());
    }

    let specs = vec![
        SensitiveFeatureSpec::from_records("catSex", &records).unwrap(),
        SensitiveFeatureSpec::from_records("dxGroup", &records).unwrap(),
    ];
    let report = build_schema(&records, &specs, 0.05).unwrap();
    eprintln!(
        "{} rows over {} sensitive features (digest {})",
        report.rows.len(),
        specs.len(),
        report.input_digest
    );
    let csv = serialize_schema(&report, ReportFormat::Csv).unwrap();
    print!("{}", String::from_utf8(csv).unwrap());
}
