use crate::domain::LabelState;

use super::LabelRecord;

/// Source categories folded into the unified opacity label.
pub const OPACITY_SOURCES: [&str; 5] = ["Atelectasis", "Edema", "Consolidation", "Pneumonia", "Lung Opacity"];

/// Positive if any source is confirmed positive, otherwise uncertain if any
/// source is uncertain, otherwise negative. Missing columns count as empty.
pub fn merge_opacity_label(record: &LabelRecord) -> LabelState {
    let states = OPACITY_SOURCES.map(|c| record.state(c));
    if states.contains(&LabelState::ConfirmedPositive) {
        LabelState::ConfirmedPositive
    } else if states.contains(&LabelState::Uncertain) {
        LabelState::Uncertain
    } else {
        LabelState::ConfirmedNegative
    }
}

/// Soft training target for a label state.
pub fn encode_label_value(state: LabelState) -> f64 {
    match state {
        LabelState::ConfirmedPositive => 0.99,
        LabelState::ConfirmedNegative | LabelState::Empty => 0.01,
        LabelState::Uncertain => 0.6,
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::labelset::{Sex, ViewPosition};

    fn record(states: &[(&str, LabelState)]) -> LabelRecord {
        LabelRecord {
            study_id: "s".into(),
            patient_id: "p".into(),
            view: ViewPosition::PA,
            categories: states
                .iter()
                .map(|(k, v)| (k.to_string(), *v))
                .collect::<BTreeMap<_, _>>(),
            sex: Sex::Female,
            age: 40,
        }
    }

    #[test]
    fn positive_dominates() {
        let r = record(&[("Pneumonia", LabelState::ConfirmedPositive)]);
        assert_eq!(merge_opacity_label(&r), LabelState::ConfirmedPositive);
        let r = record(&[
            ("Consolidation", LabelState::ConfirmedPositive),
            ("Atelectasis", LabelState::Uncertain),
        ]);
        assert_eq!(merge_opacity_label(&r), LabelState::ConfirmedPositive);
    }

    #[test]
    fn uncertain_propagates() {
        let r = record(&[
            ("Atelectasis", LabelState::Uncertain),
            ("Edema", LabelState::ConfirmedNegative),
        ]);
        assert_eq!(merge_opacity_label(&r), LabelState::Uncertain);
    }

    #[test]
    fn empty_falls_through_to_negative() {
        assert_eq!(merge_opacity_label(&record(&[])), LabelState::ConfirmedNegative);
        // Unrelated categories do not participate.
        let r = record(&[("Fracture", LabelState::ConfirmedPositive)]);
        assert_eq!(merge_opacity_label(&r), LabelState::ConfirmedNegative);
    }

    #[test]
    fn encoding_values() {
        assert_eq!(encode_label_value(LabelState::ConfirmedPositive), 0.99);
        assert_eq!(encode_label_value(LabelState::ConfirmedNegative), 0.01);
        assert_eq!(encode_label_value(LabelState::Empty), 0.01);
        assert_eq!(encode_label_value(LabelState::Uncertain), 0.6);
    }
}
