//! Population-stability-index drift check between two feature batches.
//!
//! ```bash
//! cargo run --example drift_check
//! ```

use fairmon::drift::{psi_categorical, psi_drift, DEFAULT_PSI_THRESHOLD};
use fairmon::rng::SplitMix64;

fn main() {
    let mut rng = SplitMix64::new(5150);

    // A stable numeric feature: two batches from the same process.
    let baseline: Vec<f64> = (0..5000).map(|_| rng.next_standard_normal()).collect();
    let stable: Vec<f64> = (0..5000).map(|_| rng.next_standard_normal()).collect();
    let psi = psi_drift(&baseline, &stable, 10).unwrap();
    println!("stable feature:  PSI = {psi:.5}");

    // The same feature after a location shift.
    let shifted: Vec<f64> = stable.iter().map(|v| v + 0.8).collect();
    let psi = psi_drift(&baseline, &shifted, 10).unwrap();
    println!(
        "shifted feature: PSI = {psi:.5} ({})",
        if psi > DEFAULT_PSI_THRESHOLD {
            "flagged"
        } else {
            "ok"
        }
    );

    // A categorical feature whose level mix changes.
    let pick = |rng: &mut SplitMix64, w: f64| if rng.bernoulli(w) { "ward_a" } else { "ward_b" };
    let base_cat: Vec<&str> = (0..5000).map(|_| pick(&mut rng, 0.7)).collect();
    let cur_cat: Vec<&str> = (0..5000).map(|_| pick(&mut rng, 0.4)).collect();
    let psi = psi_categorical(base_cat.iter().copied(), cur_cat.iter().copied()).unwrap();
    println!("ward mix change: PSI = {psi:.5}");

    println!(
        "\nrule of thumb: < 0.1 stable, 0.1-0.2 worth watching, > {DEFAULT_PSI_THRESHOLD} flagged"
    );
}
