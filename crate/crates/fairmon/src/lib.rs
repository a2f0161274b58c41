//! Group-fairness auditing for binary-risk clinical models.
//!
//! `fairmon` computes a full fairness-metric schema (overall accuracy plus
//! per-group and cross-group disparity metrics) over arbitrary sensitive
//! features, derives a documentation-bias sensitive feature from per-ICU
//! GCS=3 recording rates, checks input drift with the population stability
//! index, and ships a seeded cohort simulator so the whole pipeline can be
//! exercised end to end without real patient data.
//!
//! # Examples
//!
//! The `examples/` directory holds one runnable program per capability:
//!
//! - **`overall_metrics`** - confusion counts, rates and auROC on a small cohort
//! - **`group_disparities`** - per-group metrics, demographic parity and equalized odds
//! - **`fairness_schema`** - assemble and print the dynamically sized schema report
//! - **`documentation_bias`** - ICU bucketing by GCS=3 rate and a legacy-vs-robust scorer comparison
//! - **`simulate_cohort`** - write a seeded synthetic cohort CSV
//! - **`drift_check`** - PSI drift report between two batches
//!
//! ```bash
//! cargo run --example overall_metrics
//! cargo run --example documentation_bias
//! ```
//!
//! A thin `fairmon` binary wires the same library calls into `report`,
//! `derive-gcs3`, `simulate` and `drift` subcommands for file-based use.
//!
//! # Quick start
//!
//! ```
//! use fairmon::metrics::PredictionRecord;
//! use fairmon::group::{metric_by_group, GroupMetric, SensitiveFeatureSpec};
//! use std::collections::HashMap;
//!
//! let records: Vec<PredictionRecord> = [
//!     ("a", 0.9, true, "Female"),
//!     ("b", 0.1, false, "Female"),
//!     ("c", 0.7, true, "Non-Female"),
//!     ("d", 0.2, false, "Non-Female"),
//! ]
//! .into_iter()
//! .map(|(id, score, died, sex)| {
//!     let features = HashMap::from([("catSex".to_owned(), sex.to_owned())]);
//!     PredictionRecord::new(id, score, died, features).unwrap()
//! })
//! .collect();
//!
//! let spec = SensitiveFeatureSpec::from_records("catSex", &records).unwrap();
//! let by_group = metric_by_group(&records, &spec, GroupMetric::Auroc, None).unwrap();
//! assert_eq!(by_group.value("Female"), Some(Some(1.0)));
//! ```

pub mod cli;
pub mod drift;
pub mod error;
pub mod gcs;
pub mod group;
pub mod io;
pub mod metrics;
pub mod rng;
pub mod schema;
pub mod sim;

pub use error::{Error, Result};
