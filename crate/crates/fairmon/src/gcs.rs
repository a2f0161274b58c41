//! Glasgow Coma Scale validation, per-ICU GCS=3 recording rates, percentile
//! bucketing and the derived `GCS3` sensitive feature.
//!
//! Some ICUs document unscoreable (sedated) patients as GCS=3 instead of
//! recording the value as missing. Bucketing ICUs by how often they record
//! GCS=3 turns that documentation norm into a sensitive feature, so the
//! fairness machinery can compare model behaviour across documentation
//! styles.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::metrics::PredictionRecord;

/// Feature name attached to prediction records by [`attach_feature`].
pub const GCS3_FEATURE: &str = "GCS3";

/// Component breakdown of a scored GCS assessment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GcsComponents {
    pub eye: u8,
    pub verbal: u8,
    pub motor: u8,
}

/// A validated GCS assessment: a total in 3..=15, optionally with its
/// component breakdown (eye 1-4, verbal 1-5, motor 1-6, summing to the
/// total). Construction is the only way to obtain one, so every value in
/// circulation is valid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GcsScore {
    total: u8,
    components: Option<GcsComponents>,
}

impl GcsScore {
    pub fn from_total(total: u8) -> Result<Self> {
        if !(3..=15).contains(&total) {
            return Err(Error::InvalidGcs {
                stay_id: None,
                message: format!("total {total} outside 3..=15"),
            });
        }
        Ok(Self {
            total,
            components: None,
        })
    }

    pub fn from_components(eye: u8, verbal: u8, motor: u8) -> Result<Self> {
        for (name, value, hi) in [("eye", eye, 4u8), ("verbal", verbal, 5), ("motor", motor, 6)] {
            if !(1..=hi).contains(&value) {
                return Err(Error::InvalidGcs {
                    stay_id: None,
                    message: format!("{name} response {value} outside 1..={hi}"),
                });
            }
        }
        Ok(Self {
            total: eye + verbal + motor,
            components: Some(GcsComponents { eye, verbal, motor }),
        })
    }

    pub fn total(&self) -> u8 {
        self.total
    }

    pub fn components(&self) -> Option<GcsComponents> {
        self.components
    }
}

/// One ICU stay with its recorded GCS. `gcs == None` means the assessment
/// was documented as unable to score.
#[derive(Debug, Clone, PartialEq)]
pub struct StayGcsRecord {
    pub stay_id: String,
    pub icu_id: String,
    pub gcs: Option<GcsScore>,
}

/// Documentation bucket assigned to an ICU from its GCS=3 recording rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Gcs3Bucket {
    Low,
    Med,
    High,
}

impl Gcs3Bucket {
    pub fn as_str(&self) -> &'static str {
        match self {
            Gcs3Bucket::Low => "lowGCS3",
            Gcs3Bucket::Med => "medGCS3",
            Gcs3Bucket::High => "highGCS3",
        }
    }
}

impl fmt::Display for Gcs3Bucket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Per-ICU GCS=3 recording profile. `bucket` is `None` until
/// [`bucket_icus`] has run.
#[derive(Debug, Clone, PartialEq)]
pub struct IcuGcs3Profile {
    pub icu_id: String,
    pub n_stays: usize,
    pub gcs3_rate: f64,
    pub bucket: Option<Gcs3Bucket>,
}

/// Compute the GCS=3 recording rate of every ICU appearing in `stays`.
///
/// Unable-to-score stays count in the denominator but never the numerator.
/// Profiles come back in first-appearance order of the ICU id, buckets
/// unset.
pub fn icu_gcs3_rates(stays: &[StayGcsRecord]) -> Result<Vec<IcuGcs3Profile>> {
    if stays.is_empty() {
        return Err(Error::EmptyInput {
            what: "icu_gcs3_rates needs at least one stay",
        });
    }
    let mut order: Vec<String> = Vec::new();
    let mut tallies: HashMap<String, (usize, usize)> = HashMap::new();
    for stay in stays {
        if stay.icu_id.is_empty() {
            return Err(Error::Config(format!(
                "stay {:?} has an empty ICU id",
                stay.stay_id
            )));
        }
        let entry = tallies.entry(stay.icu_id.clone()).or_insert_with(|| {
            order.push(stay.icu_id.clone());
            (0, 0)
        });
        entry.0 += 1;
        if stay.gcs.map(|g| g.total()) == Some(3) {
            entry.1 += 1;
        }
    }
    Ok(order
        .into_iter()
        .map(|icu_id| {
            let (n_stays, gcs3) = tallies[&icu_id];
            IcuGcs3Profile {
                icu_id,
                n_stays,
                gcs3_rate: gcs3 as f64 / n_stays as f64,
                bucket: None,
            }
        })
        .collect())
}

/// Nearest-rank percentile: the element at 1-based index `ceil(p/100 * n)`
/// of an ascending-sorted list. `p` must lie in `(0, 100]`.
pub fn nearest_rank_percentile(sorted: &[f64], p: f64) -> Result<f64> {
    if sorted.is_empty() {
        return Err(Error::EmptyInput {
            what: "nearest_rank_percentile needs at least one value",
        });
    }
    if !(p > 0.0 && p <= 100.0) {
        return Err(Error::OutOfRange {
            what: "percentile",
            lo: 0.0,
            hi: 100.0,
            got: p,
        });
    }
    let n = sorted.len();
    let rank = (p / 100.0 * n as f64).ceil() as usize;
    Ok(sorted[rank.clamp(1, n) - 1])
}

/// Assign every profile a bucket from the 5th/95th percentiles of the rate
/// distribution.
///
/// With `P5`/`P95` the nearest-rank percentiles of the rates: an ICU is
/// `highGCS3` when its rate is at least `P95` and strictly above `P5`,
/// `lowGCS3` when at most `P5` and strictly below `P95`, `medGCS3`
/// otherwise. When every rate is equal the two guards fail and every ICU is
/// `medGCS3`.
pub fn bucket_icus(mut profiles: Vec<IcuGcs3Profile>) -> Result<Vec<IcuGcs3Profile>> {
    if profiles.is_empty() {
        return Err(Error::EmptyInput {
            what: "bucket_icus needs at least one profile",
        });
    }
    let mut rates: Vec<f64> = profiles.iter().map(|p| p.gcs3_rate).collect();
    rates.sort_by(|a, b| a.partial_cmp(b).expect("rates are never NaN"));
    let p5 = nearest_rank_percentile(&rates, 5.0)?;
    let p95 = nearest_rank_percentile(&rates, 95.0)?;
    for profile in &mut profiles {
        let rate = profile.gcs3_rate;
        profile.bucket = Some(if rate >= p95 && rate > p5 {
            Gcs3Bucket::High
        } else if rate <= p5 && rate < p95 {
            Gcs3Bucket::Low
        } else {
            Gcs3Bucket::Med
        });
    }
    Ok(profiles)
}

/// Attach the `GCS3` sensitive feature to prediction records by joining
/// record -> stay -> ICU -> bucket. All other record fields are unchanged.
pub fn attach_feature(
    records: &[PredictionRecord],
    stays: &[StayGcsRecord],
    profiles: &[IcuGcs3Profile],
) -> Result<Vec<PredictionRecord>> {
    let mut stay_to_icu: HashMap<&str, &str> = HashMap::with_capacity(stays.len());
    for stay in stays {
        if stay_to_icu
            .insert(stay.stay_id.as_str(), stay.icu_id.as_str())
            .is_some()
        {
            return Err(Error::JoinMismatch {
                identifier: stay.stay_id.clone(),
                message: "duplicate stay id in stay records".to_owned(),
            });
        }
    }
    let mut icu_to_bucket: HashMap<&str, Gcs3Bucket> = HashMap::with_capacity(profiles.len());
    for profile in profiles {
        let bucket = profile.bucket.ok_or_else(|| Error::JoinMismatch {
            identifier: profile.icu_id.clone(),
            message: "ICU profile has no bucket assigned".to_owned(),
        })?;
        icu_to_bucket.insert(profile.icu_id.as_str(), bucket);
    }

    records
        .iter()
        .map(|record| {
            let icu_id = stay_to_icu.get(record.stay_id.as_str()).ok_or_else(|| {
                Error::JoinMismatch {
                    identifier: record.stay_id.clone(),
                    message: "stay id not present in stay records".to_owned(),
                }
            })?;
            let bucket = icu_to_bucket.get(icu_id).ok_or_else(|| Error::JoinMismatch {
                identifier: (*icu_id).to_owned(),
                message: "ICU id has no bucketed profile".to_owned(),
            })?;
            let mut out = record.clone();
            out.features
                .insert(GCS3_FEATURE.to_owned(), bucket.as_str().to_owned());
            Ok(out)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{partition_by_feature, SensitiveFeatureSpec};
    use crate::rng::SplitMix64;
    use std::collections::HashMap as Map;

    fn stay(stay_id: &str, icu_id: &str, total: Option<u8>) -> StayGcsRecord {
        StayGcsRecord {
            stay_id: stay_id.to_owned(),
            icu_id: icu_id.to_owned(),
            gcs: total.map(|t| GcsScore::from_total(t).unwrap()),
        }
    }

    #[test]
    fn gcs_total_range_is_enforced() {
        for bad in [0u8, 1, 2, 16, 100] {
            assert!(GcsScore::from_total(bad).is_err(), "total {bad}");
        }
        for good in 3u8..=15 {
            assert_eq!(GcsScore::from_total(good).unwrap().total(), good);
        }
    }

    #[test]
    fn gcs_component_ranges_are_enforced() {
        assert!(GcsScore::from_components(0, 1, 1).is_err());
        assert!(GcsScore::from_components(5, 1, 1).is_err());
        assert!(GcsScore::from_components(1, 6, 1).is_err());
        assert!(GcsScore::from_components(1, 1, 7).is_err());
        let full = GcsScore::from_components(4, 5, 6).unwrap();
        assert_eq!(full.total(), 15);
        let minimal = GcsScore::from_components(1, 1, 1).unwrap();
        assert_eq!(minimal.total(), 3);
    }

    #[test]
    fn components_always_sum_to_total() {
        for eye in 1..=4u8 {
            for verbal in 1..=5u8 {
                for motor in 1..=6u8 {
                    let score = GcsScore::from_components(eye, verbal, motor).unwrap();
                    assert_eq!(score.total(), eye + verbal + motor);
                }
            }
        }
    }

    #[test]
    fn rates_count_threes_over_all_stays() {
        let stays = vec![
            stay("a", "icuA", Some(3)),
            stay("b", "icuA", Some(3)),
            stay("c", "icuA", Some(15)),
            stay("d", "icuA", Some(15)),
        ];
        let profiles = icu_gcs3_rates(&stays).unwrap();
        assert_eq!(profiles.len(), 1);
        assert_eq!(profiles[0].n_stays, 4);
        assert_eq!(profiles[0].gcs3_rate, 0.5);
    }

    #[test]
    fn unscoreable_stays_are_not_threes() {
        let stays = vec![
            stay("a", "icuB", None),
            stay("b", "icuB", None),
            stay("c", "icuB", Some(15)),
        ];
        let profiles = icu_gcs3_rates(&stays).unwrap();
        assert_eq!(profiles[0].gcs3_rate, 0.0);
        assert_eq!(profiles[0].n_stays, 3);
    }

    #[test]
    fn rates_match_counting_oracle_across_many_icus() {
        let mut rng = SplitMix64::new(53);
        let mut stays = Vec::new();
        for icu in 0..50 {
            let n = 5 + rng.next_index(30);
            for i in 0..n {
                let total = if rng.bernoulli(0.2) {
                    None
                } else if rng.bernoulli(0.3) {
                    Some(3)
                } else {
                    Some(4 + rng.next_index(12) as u8)
                };
                stays.push(stay(&format!("s{icu}_{i}"), &format!("icu{icu}"), total));
            }
        }
        let profiles = icu_gcs3_rates(&stays).unwrap();
        assert_eq!(profiles.len(), 50);
        for profile in &profiles {
            let members: Vec<&StayGcsRecord> =
                stays.iter().filter(|s| s.icu_id == profile.icu_id).collect();
            let threes = members
                .iter()
                .filter(|s| s.gcs.map(|g| g.total()) == Some(3))
                .count();
            assert_eq!(profile.n_stays, members.len());
            assert_eq!(profile.gcs3_rate, threes as f64 / members.len() as f64);
        }
    }

    #[test]
    fn percentile_examples() {
        let values = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(nearest_rank_percentile(&values, 50.0).unwrap(), 3.0);
        assert_eq!(nearest_rank_percentile(&values, 100.0).unwrap(), 5.0);
        assert!(nearest_rank_percentile(&[], 50.0).is_err());
        assert!(nearest_rank_percentile(&values, 0.0).is_err());
        assert!(nearest_rank_percentile(&values, 100.1).is_err());
    }

    #[test]
    fn percentile_matches_sort_and_index_oracle() {
        let mut rng = SplitMix64::new(59);
        let mut values: Vec<f64> = (0..100).map(|_| rng.next_f64()).collect();
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(nearest_rank_percentile(&values, 95.0).unwrap(), values[94]);
        assert_eq!(nearest_rank_percentile(&values, 5.0).unwrap(), values[4]);
        assert_eq!(nearest_rank_percentile(&values, 1.0).unwrap(), values[0]);
    }

    fn ladder_profiles() -> Vec<IcuGcs3Profile> {
        (0..100)
            .map(|i| IcuGcs3Profile {
                icu_id: format!("icu{i:03}"),
                n_stays: 100,
                gcs3_rate: i as f64 / 100.0,
                bucket: None,
            })
            .collect()
    }

    #[test]
    fn bucket_ladder_yields_5_low_6_high_89_med() {
        let bucketed = bucket_icus(ladder_profiles()).unwrap();
        let count = |b: Gcs3Bucket| bucketed.iter().filter(|p| p.bucket == Some(b)).count();
        assert_eq!(count(Gcs3Bucket::Low), 5);
        assert_eq!(count(Gcs3Bucket::High), 6);
        assert_eq!(count(Gcs3Bucket::Med), 89);
        for profile in &bucketed {
            let expected = if profile.gcs3_rate >= 0.94 {
                Gcs3Bucket::High
            } else if profile.gcs3_rate <= 0.04 {
                Gcs3Bucket::Low
            } else {
                Gcs3Bucket::Med
            };
            assert_eq!(profile.bucket, Some(expected), "{}", profile.icu_id);
        }
    }

    #[test]
    fn equal_rates_all_land_in_med() {
        let profiles: Vec<IcuGcs3Profile> = (0..20)
            .map(|i| IcuGcs3Profile {
                icu_id: format!("icu{i}"),
                n_stays: 10,
                gcs3_rate: 0.2,
                bucket: None,
            })
            .collect();
        let bucketed = bucket_icus(profiles).unwrap();
        assert!(bucketed.iter().all(|p| p.bucket == Some(Gcs3Bucket::Med)));
    }

    #[test]
    fn single_icu_is_med() {
        let bucketed = bucket_icus(vec![IcuGcs3Profile {
            icu_id: "only".into(),
            n_stays: 10,
            gcs3_rate: 0.7,
            bucket: None,
        }])
        .unwrap();
        assert_eq!(bucketed[0].bucket, Some(Gcs3Bucket::Med));
    }

    #[test]
    fn buckets_partition_and_respect_rate_order() {
        let mut rng = SplitMix64::new(61);
        let profiles: Vec<IcuGcs3Profile> = (0..60)
            .map(|i| IcuGcs3Profile {
                icu_id: format!("icu{i}"),
                n_stays: 10,
                gcs3_rate: (rng.next_u64() % 30) as f64 / 40.0,
                bucket: None,
            })
            .collect();
        let bucketed = bucket_icus(profiles).unwrap();
        assert!(bucketed.iter().all(|p| p.bucket.is_some()));
        for a in &bucketed {
            for b in &bucketed {
                if a.gcs3_rate > b.gcs3_rate {
                    assert!(
                        a.bucket.unwrap() >= b.bucket.unwrap(),
                        "rate {} bucket {:?} vs rate {} bucket {:?}",
                        a.gcs3_rate,
                        a.bucket,
                        b.gcs3_rate,
                        b.bucket
                    );
                }
            }
        }
    }

    fn pred(stay_id: &str) -> PredictionRecord {
        PredictionRecord::new(stay_id, 0.5, false, Map::new()).unwrap()
    }

    #[test]
    fn attach_adds_bucket_feature() {
        let records = vec![pred("s1")];
        let stays = vec![stay("s1", "icuH", Some(15))];
        let profiles = vec![IcuGcs3Profile {
            icu_id: "icuH".into(),
            n_stays: 1,
            gcs3_rate: 0.9,
            bucket: Some(Gcs3Bucket::High),
        }];
        let out = attach_feature(&records, &stays, &profiles).unwrap();
        assert_eq!(out[0].feature(GCS3_FEATURE), Some("highGCS3"));
        assert_eq!(out[0].stay_id, records[0].stay_id);
        assert_eq!(out[0].score, records[0].score);
    }

    #[test]
    fn attach_supports_downstream_partition() {
        let buckets = [
            ("icuL", Gcs3Bucket::Low),
            ("icuM", Gcs3Bucket::Med),
            ("icuH", Gcs3Bucket::High),
        ];
        let mut records = Vec::new();
        let mut stays = Vec::new();
        let mut profiles = Vec::new();
        for (i, (icu, bucket)) in buckets.iter().enumerate() {
            for j in 0..(i + 1) {
                let id = format!("s_{icu}_{j}");
                records.push(pred(&id));
                stays.push(stay(&id, icu, Some(15)));
            }
            profiles.push(IcuGcs3Profile {
                icu_id: (*icu).to_owned(),
                n_stays: i + 1,
                gcs3_rate: 0.1 * i as f64,
                bucket: Some(*bucket),
            });
        }
        let out = attach_feature(&records, &stays, &profiles).unwrap();
        let spec = SensitiveFeatureSpec::from_records(GCS3_FEATURE, &out).unwrap();
        let groups = partition_by_feature(&out, &spec).unwrap();
        assert_eq!(groups.len(), 3);
        let sizes: Map<&str, usize> = groups
            .iter()
            .map(|(level, members)| (level.as_str(), members.len()))
            .collect();
        assert_eq!(sizes["lowGCS3"], 1);
        assert_eq!(sizes["medGCS3"], 2);
        assert_eq!(sizes["highGCS3"], 3);
    }

    #[test]
    fn attach_on_simulator_output_matches_join_and_count_oracle() {
        use crate::sim::{simulate_cohort, CohortConfig};
        let config = CohortConfig {
            n_icus: 20,
            stays_per_icu: 30,
            ..CohortConfig::default()
        };
        let cohort = simulate_cohort(&config).unwrap();
        let stays: Vec<StayGcsRecord> = cohort
            .iter()
            .map(|s| StayGcsRecord {
                stay_id: s.stay_id.clone(),
                icu_id: s.icu_id.clone(),
                gcs: s.recorded_gcs.map(|t| GcsScore::from_total(t).unwrap()),
            })
            .collect();
        let profiles = bucket_icus(icu_gcs3_rates(&stays).unwrap()).unwrap();
        let records: Vec<PredictionRecord> = cohort
            .iter()
            .map(|s| PredictionRecord::new(s.stay_id.clone(), 0.5, s.died, Map::new()).unwrap())
            .collect();
        let joined = attach_feature(&records, &stays, &profiles).unwrap();
        let spec = SensitiveFeatureSpec::from_records(GCS3_FEATURE, &joined).unwrap();
        let groups = partition_by_feature(&joined, &spec).unwrap();
        // Per-bucket group sizes equal the per-ICU stay counts summed over
        // the ICUs assigned to that bucket.
        for (level, members) in &groups {
            let expected: usize = profiles
                .iter()
                .filter(|p| p.bucket.map(|b| b.as_str()) == Some(level.as_str()))
                .map(|p| p.n_stays)
                .sum();
            assert_eq!(members.len(), expected, "bucket {level}");
        }
        let total: usize = groups.iter().map(|(_, g)| g.len()).sum();
        assert_eq!(total, cohort.len());
    }

    #[test]
    fn attach_errors_name_the_unmatched_identifier() {
        let records = vec![pred("ghost")];
        let stays = vec![stay("s1", "icuA", Some(15))];
        let profiles = vec![IcuGcs3Profile {
            icu_id: "icuA".into(),
            n_stays: 1,
            gcs3_rate: 0.0,
            bucket: Some(Gcs3Bucket::Med),
        }];
        match attach_feature(&records, &stays, &profiles) {
            Err(Error::JoinMismatch { identifier, .. }) => assert_eq!(identifier, "ghost"),
            other => panic!("expected JoinMismatch, got {other:?}"),
        }

        let records = vec![pred("s1")];
        let orphan_stays = vec![stay("s1", "icuMissing", Some(15))];
        match attach_feature(&records, &orphan_stays, &profiles) {
            Err(Error::JoinMismatch { identifier, .. }) => assert_eq!(identifier, "icuMissing"),
            other => panic!("expected JoinMismatch, got {other:?}"),
        }
    }

    #[test]
    fn attach_rejects_unbucketed_profiles() {
        let records = vec![pred("s1")];
        let stays = vec![stay("s1", "icuA", Some(15))];
        let profiles = vec![IcuGcs3Profile {
            icu_id: "icuA".into(),
            n_stays: 1,
            gcs3_rate: 0.0,
            bucket: None,
        }];
        assert!(matches!(
            attach_feature(&records, &stays, &profiles),
            Err(Error::JoinMismatch { .. })
        ));
    }
}
