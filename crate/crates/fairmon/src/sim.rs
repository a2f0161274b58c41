//! Seeded synthetic ICU cohort generator with documentation-bias injection
//! and two black-box scorer stand-ins.
//!
//! The generator exists so the auditing pipeline has a reproducible
//! end-to-end fixture that exhibits documentation bias: ICUs differ in how
//! they record the GCS of sedated (unscoreable) patients, mortality depends
//! only on true physiology, and the two scorers differ only in how they
//! treat a recorded GCS of 3 on a sedated stay.
//!
//! Determinism: all draws come from a single [`SplitMix64`] stream seeded
//! from the config, consumed in a fixed order (one policy draw per ICU,
//! then a fixed 29 draws per stay), so a given seed produces an identical
//! cohort on every platform.

use crate::error::{Error, Result};
use crate::rng::SplitMix64;

/// Recorded GCS used when the chart value is missing or discounted.
pub const IMPUTED_GCS: u8 = 10;

/// Coefficients of a logistic model `logistic(intercept + severity * s +
/// gcs_deficit * (15 - gcs))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogisticCoeffs {
    pub intercept: f64,
    pub severity: f64,
    pub gcs_deficit: f64,
}

/// Sampling weights for the per-ICU documentation policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolicyMix {
    pub record_null: f64,
    pub record_as_3: f64,
    pub record_as_15: f64,
}

/// How an ICU documents the GCS of a sedated, unscoreable patient.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DocumentationPolicy {
    RecordNull,
    RecordAs3,
    RecordAs15,
}

/// A diagnosis group with its cohort share and severity offset.
///
/// Severity is a latent acuity score: the standard-normal base plus this
/// offset. Offsets are centred so that, at the default decision threshold,
/// only the high-risk tail of the cohort is flagged.
#[derive(Debug, Clone, PartialEq)]
pub struct DxGroup {
    pub name: String,
    pub weight: f64,
    pub severity_offset: f64,
}

/// Simulator parameters. [`CohortConfig::default`] gives the documented
/// desk-scale configuration (100 ICUs x 200 stays).
#[derive(Debug, Clone, PartialEq)]
pub struct CohortConfig {
    pub seed: u64,
    pub n_icus: usize,
    pub stays_per_icu: usize,
    /// Probability that a stay is sedated and therefore unscoreable.
    pub sedation_rate: f64,
    pub policy_mix: PolicyMix,
    pub dx_mix: Vec<DxGroup>,
    pub sex_mix: Vec<(String, f64)>,
    pub race_mix: Vec<(String, f64)>,
    /// Coefficients of the true mortality process.
    pub mortality_coeffs: LogisticCoeffs,
    /// Coefficients both scorers use. Equal to the mortality coefficients
    /// by default, so scorer error comes only from the noisy severity proxy
    /// and the recorded GCS.
    pub scorer_coeffs: LogisticCoeffs,
    /// Standard deviation of the noise separating the severity proxy seen
    /// by scorers from true severity.
    pub severity_noise_sd: f64,
}

fn pairs(items: &[(&str, f64)]) -> Vec<(String, f64)> {
    items.iter().map(|(n, w)| ((*n).to_owned(), *w)).collect()
}

impl Default for CohortConfig {
    fn default() -> Self {
        let coeffs = LogisticCoeffs {
            intercept: -3.0,
            severity: 1.2,
            gcs_deficit: 0.25,
        };
        Self {
            seed: 42,
            n_icus: 100,
            stays_per_icu: 200,
            sedation_rate: 0.15,
            policy_mix: PolicyMix {
                record_null: 0.5,
                record_as_3: 0.3,
                record_as_15: 0.2,
            },
            dx_mix: vec![
                DxGroup {
                    name: "CardiacArrest".into(),
                    weight: 0.05,
                    severity_offset: 1.2,
                },
                DxGroup {
                    name: "ARDS".into(),
                    weight: 0.05,
                    severity_offset: -0.8,
                },
                DxGroup {
                    name: "DKA".into(),
                    weight: 0.08,
                    severity_offset: -3.0,
                },
                DxGroup {
                    name: "Other".into(),
                    weight: 0.82,
                    severity_offset: -1.8,
                },
            ],
            sex_mix: pairs(&[("Female", 0.45), ("Non-Female", 0.55)]),
            race_mix: pairs(&[
                ("African American", 0.11),
                ("Asian", 0.02),
                ("Caucasian", 0.77),
                ("Hispanic", 0.04),
                ("Native American", 0.01),
                ("Other/Unknown", 0.05),
            ]),
            mortality_coeffs: coeffs,
            scorer_coeffs: coeffs,
            severity_noise_sd: 0.5,
        }
    }
}

const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

fn check_weights(what: &str, weights: &[f64]) -> Result<()> {
    if weights.iter().any(|w| *w < 0.0 || !w.is_finite()) {
        return Err(Error::Config(format!(
            "{what} weights must be non-negative and finite"
        )));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
        return Err(Error::Config(format!(
            "{what} weights must sum to 1, got {total}"
        )));
    }
    Ok(())
}

impl CohortConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_icus == 0 || self.stays_per_icu == 0 {
            return Err(Error::Config(
                "n_icus and stays_per_icu must be positive".to_owned(),
            ));
        }
        if !(0.0..=1.0).contains(&self.sedation_rate) {
            return Err(Error::OutOfRange {
                what: "sedation_rate",
                lo: 0.0,
                hi: 1.0,
                got: self.sedation_rate,
            });
        }
        check_weights(
            "policy_mix",
            &[
                self.policy_mix.record_null,
                self.policy_mix.record_as_3,
                self.policy_mix.record_as_15,
            ],
        )?;
        let dx_weights: Vec<f64> = self.dx_mix.iter().map(|d| d.weight).collect();
        check_weights("dx_mix", &dx_weights)?;
        let sex_weights: Vec<f64> = self.sex_mix.iter().map(|(_, w)| *w).collect();
        check_weights("sex_mix", &sex_weights)?;
        let race_weights: Vec<f64> = self.race_mix.iter().map(|(_, w)| *w).collect();
        check_weights("race_mix", &race_weights)?;
        if self.dx_mix.is_empty() || self.sex_mix.is_empty() || self.race_mix.is_empty() {
            return Err(Error::Config(
                "dx_mix, sex_mix and race_mix must be non-empty".to_owned(),
            ));
        }
        if !(self.severity_noise_sd >= 0.0 && self.severity_noise_sd.is_finite()) {
            return Err(Error::Config(
                "severity_noise_sd must be non-negative and finite".to_owned(),
            ));
        }
        Ok(())
    }
}

/// One simulated stay.
///
/// `severity_proxy` is the noisy acuity signal the scorers see; it is drawn
/// during generation so scoring stays a pure function of the stay.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedStay {
    pub stay_id: String,
    pub icu_id: String,
    pub sex: String,
    pub race: String,
    pub dx_group: String,
    pub severity: f64,
    pub severity_proxy: f64,
    pub true_gcs: u8,
    pub sedated: bool,
    pub recorded_gcs: Option<u8>,
    pub died: bool,
}

pub fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Monotone map from latent severity onto a GCS total in 3..=15.
///
/// Deficit grows at 5.5 points per severity unit above 0.25, so the bulk of
/// the cohort sits at GCS 15 and only the sickest tail reaches GCS 3.
fn true_gcs_from_severity(severity: f64) -> u8 {
    let deficit = (5.5 * (severity - 0.25)).round().clamp(0.0, 12.0);
    15 - deficit as u8
}

/// Generate the cohort described by `config`. Deterministic for a fixed
/// seed; mortality is sampled from true physiology only, never from
/// recorded values.
pub fn simulate_cohort(config: &CohortConfig) -> Result<Vec<SimulatedStay>> {
    config.validate()?;
    let mut rng = SplitMix64::new(config.seed);
    let policy_weights = [
        config.policy_mix.record_null,
        config.policy_mix.record_as_3,
        config.policy_mix.record_as_15,
    ];
    let dx_weights: Vec<f64> = config.dx_mix.iter().map(|d| d.weight).collect();
    let sex_weights: Vec<f64> = config.sex_mix.iter().map(|(_, w)| *w).collect();
    let race_weights: Vec<f64> = config.race_mix.iter().map(|(_, w)| *w).collect();

    let mut stays = Vec::with_capacity(config.n_icus * config.stays_per_icu);
    let mut stay_counter = 0usize;
    for icu_index in 0..config.n_icus {
        let icu_id = format!("icu{icu_index:04}");
        let policy = match rng.categorical(&policy_weights) {
            0 => DocumentationPolicy::RecordNull,
            1 => DocumentationPolicy::RecordAs3,
            _ => DocumentationPolicy::RecordAs15,
        };
        for _ in 0..config.stays_per_icu {
            let sex = config.sex_mix[rng.categorical(&sex_weights)].0.clone();
            let race = config.race_mix[rng.categorical(&race_weights)].0.clone();
            let dx = &config.dx_mix[rng.categorical(&dx_weights)];
            let severity = rng.next_standard_normal() + dx.severity_offset;
            let sedated = rng.bernoulli(config.sedation_rate);
            let severity_proxy =
                severity + config.severity_noise_sd * rng.next_standard_normal();
            let true_gcs = true_gcs_from_severity(severity);
            let recorded_gcs = if sedated {
                match policy {
                    DocumentationPolicy::RecordNull => None,
                    DocumentationPolicy::RecordAs3 => Some(3),
                    DocumentationPolicy::RecordAs15 => Some(15),
                }
            } else {
                Some(true_gcs)
            };
            let c = &config.mortality_coeffs;
            let mortality_risk = logistic(
                c.intercept + c.severity * severity + c.gcs_deficit * f64::from(15 - true_gcs),
            );
            let died = rng.bernoulli(mortality_risk);
            stays.push(SimulatedStay {
                stay_id: format!("stay{stay_counter:07}"),
                icu_id: icu_id.clone(),
                sex,
                race,
                dx_group: dx.name.clone(),
                severity,
                severity_proxy,
                true_gcs,
                sedated,
                recorded_gcs,
                died,
            });
            stay_counter += 1;
        }
    }
    Ok(stays)
}

fn score_with_gcs(stay: &SimulatedStay, coeffs: &LogisticCoeffs, effective_gcs: u8) -> f64 {
    logistic(
        coeffs.intercept
            + coeffs.severity * stay.severity_proxy
            + coeffs.gcs_deficit * f64::from(15 - effective_gcs),
    )
}

/// The legacy scorer takes the recorded GCS at face value, imputing missing
/// values to [`IMPUTED_GCS`]. It ignores the sedation flag entirely.
pub fn score_legacy(stay: &SimulatedStay, coeffs: &LogisticCoeffs) -> f64 {
    score_with_gcs(stay, coeffs, stay.recorded_gcs.unwrap_or(IMPUTED_GCS))
}

/// The robust scorer matches [`score_legacy`] except on sedated stays with
/// a recorded GCS of 3: there the minimum is discounted as uninformative
/// and replaced by [`IMPUTED_GCS`] before scoring.
pub fn score_robust(stay: &SimulatedStay, coeffs: &LogisticCoeffs) -> f64 {
    let effective = match stay.recorded_gcs {
        Some(3) if stay.sedated => IMPUTED_GCS,
        Some(g) => g,
        None => IMPUTED_GCS,
    };
    score_with_gcs(stay, coeffs, effective)
}
