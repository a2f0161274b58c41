//! Input-drift detection via the population stability index.
//!
//! PSI compares a current batch against a fixed baseline:
//! `sum over bins of (p - q) * ln(p / q)` with proportions floored at
//! [`PSI_EPSILON`]. Numeric features are binned at baseline quantile edges
//! (outermost bins extended to the infinities); categorical features use
//! one bin per baseline level. Bins derive from the baseline only, so the
//! baseline report stays stable as new batches arrive.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Floor applied to binned proportions before the log ratio.
pub const PSI_EPSILON: f64 = 1e-4;

/// Default number of quantile bins for numeric features.
pub const DEFAULT_PSI_BINS: usize = 10;

/// Default PSI level above which a feature is flagged as drifted.
pub const DEFAULT_PSI_THRESHOLD: f64 = 0.2;

fn psi_from_counts(baseline_counts: &[usize], current_counts: &[usize], n_base: usize, n_cur: usize) -> f64 {
    let mut psi = 0.0;
    for (b, c) in baseline_counts.iter().zip(current_counts) {
        let p = (*b as f64 / n_base as f64).max(PSI_EPSILON);
        let q = (*c as f64 / n_cur as f64).max(PSI_EPSILON);
        psi += (p - q) * (p / q).ln();
    }
    psi
}

/// Inner bin edges at the `k/n_bins` quantiles of the baseline, computed by
/// nearest rank. Duplicate edges are kept; the bins they strand simply stay
/// empty and get floored.
fn quantile_edges(sorted_baseline: &[f64], n_bins: usize) -> Vec<f64> {
    let n = sorted_baseline.len();
    (1..n_bins)
        .map(|k| {
            let rank = ((k * n) as f64 / n_bins as f64).ceil() as usize;
            sorted_baseline[rank.clamp(1, n) - 1]
        })
        .collect()
}

/// Bin index for `value` in `(-inf, e1], (e1, e2], ..., (e_last, +inf)`.
fn bin_index(edges: &[f64], value: f64) -> usize {
    edges.partition_point(|e| *e < value)
}

/// PSI between two numeric samples using `n_bins` baseline-quantile bins.
///
/// Identical multisets give exactly 0; permuting either input changes
/// nothing.
pub fn psi_drift(baseline: &[f64], current: &[f64], n_bins: usize) -> Result<f64> {
    if baseline.is_empty() || current.is_empty() {
        return Err(Error::EmptyInput {
            what: "psi_drift needs non-empty baseline and current samples",
        });
    }
    if n_bins < 2 {
        return Err(Error::Config(format!(
            "psi_drift needs at least 2 bins, got {n_bins}"
        )));
    }
    if baseline.iter().chain(current).any(|v| v.is_nan()) {
        return Err(Error::Config("psi_drift input contains NaN".to_owned()));
    }
    let mut sorted = baseline.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("NaN ruled out above"));
    let edges = quantile_edges(&sorted, n_bins);

    let mut baseline_counts = vec![0usize; n_bins];
    let mut current_counts = vec![0usize; n_bins];
    for v in baseline {
        baseline_counts[bin_index(&edges, *v)] += 1;
    }
    for v in current {
        current_counts[bin_index(&edges, *v)] += 1;
    }
    Ok(psi_from_counts(
        &baseline_counts,
        &current_counts,
        baseline.len(),
        current.len(),
    ))
}

/// PSI between two categorical samples with one bin per baseline level
/// (first-appearance order). Current-only levels fall into a single
/// overflow bin whose baseline count is zero.
pub fn psi_categorical<'a, B, C>(baseline: B, current: C) -> Result<f64>
where
    B: IntoIterator<Item = &'a str>,
    C: IntoIterator<Item = &'a str>,
{
    let mut levels: Vec<&str> = Vec::new();
    let mut baseline_counts: Vec<usize> = Vec::new();
    let mut n_base = 0usize;
    for value in baseline {
        n_base += 1;
        match levels.iter().position(|l| *l == value) {
            Some(i) => baseline_counts[i] += 1,
            None => {
                levels.push(value);
                baseline_counts.push(1);
            }
        }
    }
    let mut current_counts = vec![0usize; levels.len()];
    let mut overflow = 0usize;
    let mut n_cur = 0usize;
    for value in current {
        n_cur += 1;
        match levels.iter().position(|l| *l == value) {
            Some(i) => current_counts[i] += 1,
            None => overflow += 1,
        }
    }
    if n_base == 0 || n_cur == 0 {
        return Err(Error::EmptyInput {
            what: "psi_categorical needs non-empty baseline and current samples",
        });
    }
    if overflow > 0 {
        baseline_counts.push(0);
        current_counts.push(overflow);
    }
    Ok(psi_from_counts(
        &baseline_counts,
        &current_counts,
        n_base,
        n_cur,
    ))
}

/// How a feature was binned for PSI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FeatureBinning {
    /// Numeric feature with the inner quantile edges used.
    Numeric { bin_edges: Vec<f64> },
    /// Categorical feature with the baseline level set.
    Categorical { levels: Vec<String> },
}

/// Drift result for one feature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureDrift {
    pub feature: String,
    pub psi: f64,
    #[serde(flatten)]
    pub binning: FeatureBinning,
}

/// Drift results for a batch of features, in baseline column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftReport {
    pub threshold: f64,
    pub features: Vec<FeatureDrift>,
    /// Features whose PSI exceeds the threshold.
    pub flagged: Vec<String>,
}

impl DriftReport {
    /// Assemble a report and its flagged list from per-feature results.
    pub fn new(threshold: f64, features: Vec<FeatureDrift>) -> Self {
        let flagged = features
            .iter()
            .filter(|f| f.psi > threshold)
            .map(|f| f.feature.clone())
            .collect();
        Self {
            threshold,
            features,
            flagged,
        }
    }

    pub fn psi(&self, feature: &str) -> Option<f64> {
        self.features
            .iter()
            .find(|f| f.feature == feature)
            .map(|f| f.psi)
    }

    pub fn to_json(&self) -> Result<Vec<u8>> {
        let mut bytes = serde_json::to_vec_pretty(self)?;
        bytes.push(b'\n');
        Ok(bytes)
    }
}

/// Compare one named column of string cells, choosing numeric or
/// categorical PSI. A column is numeric when every non-empty cell on both
/// sides parses as a finite float; empty cells are treated as missing and
/// skipped.
pub fn column_drift(
    name: &str,
    baseline: &[String],
    current: &[String],
    n_bins: usize,
) -> Result<FeatureDrift> {
    let base_cells: Vec<&str> = baseline.iter().map(String::as_str).filter(|s| !s.is_empty()).collect();
    let cur_cells: Vec<&str> = current.iter().map(String::as_str).filter(|s| !s.is_empty()).collect();
    if base_cells.is_empty() || cur_cells.is_empty() {
        return Err(Error::EmptyInput {
            what: "column_drift needs non-empty baseline and current columns",
        });
    }
    let parse_all = |cells: &[&str]| -> Option<Vec<f64>> {
        cells
            .iter()
            .map(|s| s.parse::<f64>().ok().filter(|v| v.is_finite()))
            .collect()
    };
    match (parse_all(&base_cells), parse_all(&cur_cells)) {
        (Some(base_vals), Some(cur_vals)) => {
            let psi = psi_drift(&base_vals, &cur_vals, n_bins)?;
            let mut sorted = base_vals;
            sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite by construction"));
            Ok(FeatureDrift {
                feature: name.to_owned(),
                psi,
                binning: FeatureBinning::Numeric {
                    bin_edges: quantile_edges(&sorted, n_bins),
                },
            })
        }
        _ => {
            let psi = psi_categorical(base_cells.iter().copied(), cur_cells.iter().copied())?;
            let mut levels: Vec<String> = Vec::new();
            for cell in &base_cells {
                if !levels.iter().any(|l| l == cell) {
                    levels.push((*cell).to_owned());
                }
            }
            Ok(FeatureDrift {
                feature: name.to_owned(),
                psi,
                binning: FeatureBinning::Categorical { levels },
            })
        }
    }
}
