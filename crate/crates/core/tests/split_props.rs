use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use trx_core::labelset::{patient_level_split, LabelRecord, Sex, ViewPosition};
use trx_core::LabelState;

fn record(study: usize, patient: usize, positive: bool) -> LabelRecord {
    let state = if positive {
        LabelState::ConfirmedPositive
    } else {
        LabelState::ConfirmedNegative
    };
    LabelRecord {
        study_id: format!("s{study}"),
        patient_id: format!("p{patient}"),
        view: ViewPosition::PA,
        categories: BTreeMap::from([("Edema".to_string(), state)]),
        sex: Sex::Female,
        age: 50,
    }
}

fn cohort() -> impl Strategy<Value = Vec<LabelRecord>> {
    prop::collection::vec((0usize..60, any::<bool>()), 1..200).prop_map(|rows| {
        rows.into_iter()
            .enumerate()
            .map(|(i, (p, pos))| record(i, p, pos))
            .collect()
    })
}

fn positive(r: &LabelRecord) -> bool {
    r.state("Edema").is_positive()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn patients_never_straddle(records in cohort(), seed in any::<u64>()) {
        let m = patient_level_split(&records, positive, 0.2, seed).unwrap();
        let mut side: BTreeMap<&str, bool> = BTreeMap::new();
        for r in &records {
            let in_tune = m.tune_ids.contains(&r.study_id);
            prop_assert_ne!(in_tune, m.train_ids.contains(&r.study_id));
            if let Some(prev) = side.insert(&r.patient_id, in_tune) {
                prop_assert_eq!(prev, in_tune);
            }
        }
        prop_assert_eq!(m.train_ids.len() + m.tune_ids.len(), records.len());

        // Integer form of ceil(n / 5) per stratum.
        let mut strata: BTreeMap<&str, bool> = BTreeMap::new();
        for r in &records {
            *strata.entry(&r.patient_id).or_insert(false) |= positive(r);
        }
        for want in [true, false] {
            let patients: BTreeSet<&str> = strata.iter().filter(|(_, &p)| p == want).map(|(id, _)| *id).collect();
            let tuned = patients.iter().filter(|p| side[*p]).count();
            prop_assert_eq!(tuned, patients.len().div_ceil(5));
        }
    }

    #[test]
    fn order_invariant(records in cohort(), seed in any::<u64>(), k in 0usize..200) {
        let a = patient_level_split(&records, positive, 0.2, seed).unwrap();
        let mut shuffled = records.clone();
        let k = k % shuffled.len();
        shuffled.rotate_left(k);
        shuffled.reverse();
        prop_assert_eq!(a, patient_level_split(&shuffled, positive, 0.2, seed).unwrap());
    }
}
