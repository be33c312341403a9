use std::collections::BTreeSet;
use std::fmt;

use crate::domain::LabelState;

use super::{merge_opacity_label, LabelRecord, ViewPosition, NO_FINDING, SUPPORT_DEVICES};

/// Record-level inclusion predicate.
pub type InclusionRule = fn(&LabelRecord) -> bool;

#[derive(Debug, Clone, Default)]
pub struct FilterRules {
    pub frontal_only: bool,
    pub exclude_ap: bool,
    /// Categories whose confirmed-positive state excludes the study.
    pub exclude_confirmed: BTreeSet<String>,
    pub inclusion: Option<InclusionRule>,
}

impl FilterRules {
    /// Selection used for the opacity training set: frontal PA studies
    /// without confirmed support devices that are either finding-free or
    /// opacity-labelled.
    pub fn opacity_training() -> Self {
        FilterRules {
            frontal_only: true,
            exclude_ap: true,
            exclude_confirmed: BTreeSet::from([SUPPORT_DEVICES.to_string()]),
            inclusion: Some(opacity_training_inclusion),
        }
    }
}

/// Keeps studies whose "No Finding" or unified opacity label is positive or
/// uncertain.
pub fn opacity_training_inclusion(record: &LabelRecord) -> bool {
    let flagged = |s: LabelState| matches!(s, LabelState::ConfirmedPositive | LabelState::Uncertain);
    flagged(record.state(NO_FINDING)) || flagged(merge_opacity_label(record))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExcludeReason {
    Lateral,
    Anteroposterior,
    ConfirmedCategory(String),
    NotIncluded,
}

impl fmt::Display for ExcludeReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExcludeReason::Lateral => f.write_str("lateral"),
            ExcludeReason::Anteroposterior => f.write_str("anteroposterior"),
            ExcludeReason::ConfirmedCategory(c) => f.write_str(c),
            ExcludeReason::NotIncluded => f.write_str("inclusion"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decision {
    Keep,
    Exclude(ExcludeReason),
}

/// Rules are checked in a fixed order (view, AP, excluded categories,
/// inclusion predicate); the first failing rule is reported. Excluded
/// categories are checked in lexical order.
pub fn apply_selection_filters(record: &LabelRecord, rules: &FilterRules) -> Decision {
    // Unknown view positions are not treated as lateral.
    if rules.frontal_only && record.view == ViewPosition::Lateral {
        return Decision::Exclude(ExcludeReason::Lateral);
    }
    if rules.exclude_ap && record.view == ViewPosition::AP {
        return Decision::Exclude(ExcludeReason::Anteroposterior);
    }
    if let Some(c) = rules.exclude_confirmed.iter().find(|c| record.state(c).is_positive()) {
        return Decision::Exclude(ExcludeReason::ConfirmedCategory(c.clone()));
    }
    match rules.inclusion {
        Some(rule) if !rule(record) => Decision::Exclude(ExcludeReason::NotIncluded),
        _ => Decision::Keep,
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::labelset::Sex;

    fn record(view: ViewPosition, states: &[(&str, LabelState)]) -> LabelRecord {
        LabelRecord {
            study_id: "s".into(),
            patient_id: "p".into(),
            view,
            categories: states
                .iter()
                .map(|(k, v)| (k.to_string(), *v))
                .collect::<BTreeMap<_, _>>(),
            sex: Sex::Male,
            age: 50,
        }
    }

    #[test]
    fn lateral_excluded_first() {
        let r = record(
            ViewPosition::Lateral,
            &[(SUPPORT_DEVICES, LabelState::ConfirmedPositive)],
        );
        assert_eq!(
            apply_selection_filters(&r, &FilterRules::opacity_training()),
            Decision::Exclude(ExcludeReason::Lateral)
        );
        let rules = FilterRules {
            frontal_only: true,
            ..Default::default()
        };
        assert_eq!(
            apply_selection_filters(&record(ViewPosition::Lateral, &[]), &rules).clone(),
            Decision::Exclude(ExcludeReason::Lateral)
        );
    }

    #[test]
    fn ap_excluded() {
        let r = record(ViewPosition::AP, &[(NO_FINDING, LabelState::ConfirmedPositive)]);
        assert_eq!(
            apply_selection_filters(&r, &FilterRules::opacity_training()),
            Decision::Exclude(ExcludeReason::Anteroposterior)
        );
    }

    #[test]
    fn support_devices_excluded() {
        let r = record(ViewPosition::PA, &[(SUPPORT_DEVICES, LabelState::ConfirmedPositive)]);
        let d = apply_selection_filters(&r, &FilterRules::opacity_training());
        assert_eq!(
            d,
            Decision::Exclude(ExcludeReason::ConfirmedCategory(SUPPORT_DEVICES.into()))
        );
        // Uncertain devices do not exclude.
        let r = record(
            ViewPosition::PA,
            &[
                (SUPPORT_DEVICES, LabelState::Uncertain),
                ("Edema", LabelState::Uncertain),
            ],
        );
        assert_eq!(
            apply_selection_filters(&r, &FilterRules::opacity_training()),
            Decision::Keep
        );
    }

    #[test]
    fn inclusion_rule() {
        let r = record(ViewPosition::PA, &[(NO_FINDING, LabelState::ConfirmedPositive)]);
        assert_eq!(
            apply_selection_filters(&r, &FilterRules::opacity_training()),
            Decision::Keep
        );
        let r = record(ViewPosition::PA, &[("Fracture", LabelState::ConfirmedPositive)]);
        assert_eq!(
            apply_selection_filters(&r, &FilterRules::opacity_training()),
            Decision::Exclude(ExcludeReason::NotIncluded)
        );
        assert_eq!(apply_selection_filters(&r, &FilterRules::default()), Decision::Keep);
    }
}
