use std::collections::BTreeMap;

use trx_core::labelset::{encode_label_value, merge_opacity_label, LabelRecord, Sex, ViewPosition, OPACITY_SOURCES};
use trx_core::LabelState;

const STATES: [LabelState; 4] = [
    LabelState::ConfirmedPositive,
    LabelState::ConfirmedNegative,
    LabelState::Uncertain,
    LabelState::Empty,
];

fn record(states: &[LabelState; 5]) -> LabelRecord {
    LabelRecord {
        study_id: "s".into(),
        patient_id: "p".into(),
        view: ViewPosition::PA,
        categories: OPACITY_SOURCES
            .iter()
            .zip(states)
            .filter(|(_, s)| **s != LabelState::Empty)
            .map(|(c, s)| (c.to_string(), *s))
            .collect::<BTreeMap<_, _>>(),
        sex: Sex::Male,
        age: 40,
    }
}

fn rule(states: &[LabelState; 5]) -> LabelState {
    let positives = states.iter().filter(|s| **s == LabelState::ConfirmedPositive).count();
    let uncertain = states.iter().filter(|s| **s == LabelState::Uncertain).count();
    match (positives, uncertain) {
        (1.., _) => LabelState::ConfirmedPositive,
        (0, 1..) => LabelState::Uncertain,
        (0, 0) => LabelState::ConfirmedNegative,
    }
}

fn all_combinations() -> impl Iterator<Item = [LabelState; 5]> {
    (0..4usize.pow(5)).map(|code| std::array::from_fn(|i| STATES[code / 4usize.pow(i as u32) % 4]))
}

#[test]
fn exhaustive_merge() {
    let mut seen = 0;
    for states in all_combinations() {
        assert_eq!(merge_opacity_label(&record(&states)), rule(&states), "{states:?}");
        seen += 1;
    }
    assert_eq!(seen, 1024);
}

#[test]
fn upgrades_are_monotone() {
    let rank = |s: LabelState| match s {
        LabelState::ConfirmedNegative | LabelState::Empty => 0,
        LabelState::Uncertain => 1,
        LabelState::ConfirmedPositive => 2,
    };
    for states in all_combinations() {
        let base = rank(merge_opacity_label(&record(&states)));
        for i in 0..5 {
            for up in [LabelState::Uncertain, LabelState::ConfirmedPositive] {
                if rank(up) <= rank(states[i]) {
                    continue;
                }
                let mut next = states;
                next[i] = up;
                let merged = merge_opacity_label(&record(&next));
                assert!(rank(merged) >= base);
                if up == LabelState::ConfirmedPositive {
                    assert_eq!(merged, LabelState::ConfirmedPositive);
                }
            }
        }
    }
}

#[test]
fn encoding_image() {
    let values: Vec<f64> = STATES.iter().map(|&s| encode_label_value(s)).collect();
    assert_eq!(values, [0.99, 0.01, 0.6, 0.01]);
}
