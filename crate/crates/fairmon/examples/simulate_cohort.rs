//! Write a seeded synthetic cohort to `cohort.csv` in the working
//! directory, scored by both scorers.
//!
//! ```bash
//! cargo run --example simulate_cohort
//! ```

use std::path::Path;

use fairmon::io::{cohort_to_csv, write_bytes_atomic};
use fairmon::sim::{simulate_cohort, CohortConfig};

fn main() {
    let config = CohortConfig {
        n_icus: 20,
        stays_per_icu: 50,
        ..CohortConfig::default()
    };
    let stays = simulate_cohort(&config).unwrap();

    let died = stays.iter().filter(|s| s.died).count();
    let sedated = stays.iter().filter(|s| s.sedated).count();
    let nulls = stays.iter().filter(|s| s.recorded_gcs.is_none()).count();
    println!(
        "{} stays: {:.1}% mortality, {:.1}% sedated, {} charted as unable to score",
        stays.len(),
        100.0 * died as f64 / stays.len() as f64,
        100.0 * sedated as f64 / stays.len() as f64,
        nulls
    );

    let out = Path::new("cohort.csv");
    write_bytes_atomic(out, &cohort_to_csv(&stays, &config.scorer_coeffs)).unwrap();
    println!("wrote {}", out.display());
    println!("same seed, same file: rerun and diff to check");
}
