use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TrxError};
use crate::rng;

use super::LabelRecord;

pub const DEFAULT_TUNE_FRACTION: f64 = 0.2;

/// Slack applied before taking the ceiling of `stratum size * fraction`, so
/// products such as `10 * 0.3` that land a few ulps above an integer are not
/// rounded up.
const CEIL_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SplitManifest {
    pub seed: u64,
    pub train_ids: BTreeSet<String>,
    pub tune_ids: BTreeSet<String>,
}

/// Number of patients a stratum of `n` sends to the tuning side.
pub(crate) fn tune_quota(n: usize, fraction: f64) -> usize {
    ((n as f64 * fraction - CEIL_SLACK).ceil().max(0.0) as usize).min(n)
}

/// Splits studies into train/tune sets with the patient as the unit.
///
/// A patient is positive when any of their studies satisfies `positive_of`.
/// Each stratum is sorted by patient id, shuffled with its own ChaCha stream
/// (0 for positive patients, 1 for negative), and its first
/// `ceil(size * tune_fraction)` patients go to tune.
pub fn patient_level_split(
    records: &[LabelRecord],
    positive_of: impl Fn(&LabelRecord) -> bool,
    tune_fraction: f64,
    seed: u64,
) -> Result<SplitManifest> {
    if !(tune_fraction > 0.0 && tune_fraction < 1.0) {
        return Err(TrxError::invalid(format!(
            "tune fraction must lie in (0, 1), got {tune_fraction}"
        )));
    }
    if records.is_empty() {
        return Err(TrxError::invalid("no records to split"));
    }

    let mut patients: BTreeMap<&str, (bool, Vec<&str>)> = BTreeMap::new();
    let mut seen = BTreeSet::new();
    for r in records {
        if r.patient_id.is_empty() {
            return Err(TrxError::invalid(format!("study {} has no patient id", r.study_id)));
        }
        if !seen.insert(r.study_id.as_str()) {
            return Err(TrxError::invalid(format!("duplicate study id {}", r.study_id)));
        }
        let entry = patients.entry(&r.patient_id).or_default();
        entry.0 |= positive_of(r);
        entry.1.push(&r.study_id);
    }

    let mut manifest = SplitManifest {
        seed,
        train_ids: BTreeSet::new(),
        tune_ids: BTreeSet::new(),
    };
    for (stream, positive) in [(0u64, true), (1u64, false)] {
        let mut stratum: Vec<&str> = patients
            .iter()
            .filter(|(_, (pos, _))| *pos == positive)
            .map(|(id, _)| *id)
            .collect();
        stratum.shuffle(&mut rng::substream(seed, stream));
        let quota = tune_quota(stratum.len(), tune_fraction);
        for (i, pid) in stratum.iter().enumerate() {
            let side = if i < quota {
                &mut manifest.tune_ids
            } else {
                &mut manifest.train_ids
            };
            side.extend(patients[pid].1.iter().map(|s| s.to_string()));
        }
    }
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::LabelState;
    use crate::labelset::{Sex, ViewPosition};

    fn rec(study: &str, patient: &str, positive: bool) -> LabelRecord {
        let state = if positive {
            LabelState::ConfirmedPositive
        } else {
            LabelState::ConfirmedNegative
        };
        LabelRecord {
            study_id: study.into(),
            patient_id: patient.into(),
            view: ViewPosition::PA,
            categories: [("Fracture".to_string(), state)].into(),
            sex: Sex::Other,
            age: 30,
        }
    }

    fn is_pos(r: &LabelRecord) -> bool {
        r.state("Fracture").is_positive()
    }

    #[test]
    fn one_of_each_stratum_goes_to_tune() {
        let records: Vec<_> = (0..10)
            .map(|i| rec(&format!("s{i}"), &format!("p{i}"), i < 5))
            .collect();
        let m = patient_level_split(&records, is_pos, 0.2, 3).unwrap();
        assert_eq!(m.tune_ids.len(), 2);
        let tune_pos = m
            .tune_ids
            .iter()
            .filter(|id| id[1..].parse::<usize>().unwrap() < 5)
            .count();
        assert_eq!(tune_pos, 1);
        assert_eq!(m.train_ids.len(), 8);
    }

    #[test]
    fn studies_of_a_patient_stay_together() {
        let mut records = vec![rec("a1", "pa", false), rec("a2", "pa", true), rec("a3", "pa", false)];
        records.extend((0..6).map(|i| rec(&format!("b{i}"), &format!("pb{i}"), false)));
        for seed in 0..20 {
            let m = patient_level_split(&records, is_pos, 0.2, seed).unwrap();
            let sides: Vec<bool> = ["a1", "a2", "a3"].iter().map(|s| m.tune_ids.contains(*s)).collect();
            assert!(sides.iter().all(|&t| t == sides[0]));
            // pa is the only positive patient, so it always lands in tune.
            assert!(sides[0]);
        }
    }

    #[test]
    fn rejects_bad_fraction_and_empty_input() {
        let records = vec![rec("s", "p", true)];
        assert!(patient_level_split(&records, is_pos, 0.0, 1).is_err());
        assert!(patient_level_split(&records, is_pos, 1.0, 1).is_err());
        assert!(patient_level_split(&[], is_pos, 0.2, 1).is_err());
    }

    #[test]
    fn quota_uses_exact_ceiling() {
        assert_eq!(tune_quota(5, 0.2), 1);
        assert_eq!(tune_quota(10, 0.3), 3);
        assert_eq!(tune_quota(11, 0.2), 3);
        assert_eq!(tune_quota(0, 0.2), 0);
    }

    #[test]
    fn deterministic_and_order_invariant() {
        let records: Vec<_> = (0..30)
            .map(|i| rec(&format!("s{i}"), &format!("p{}", i / 2), i % 3 == 0))
            .collect();
        let a = patient_level_split(&records, is_pos, 0.2, 11).unwrap();
        let mut rev = records.clone();
        rev.reverse();
        let b = patient_level_split(&rev, is_pos, 0.2, 11).unwrap();
        assert_eq!(a, b);
    }
}
