//! Dataset engineering: label unification and encoding, selection filters,
//! the RLE mask codec and patient-level stratified splitting.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::domain::LabelState;

mod filter;
mod merge;
mod rle;
mod split;

pub use filter::{apply_selection_filters, opacity_training_inclusion, Decision, ExcludeReason, FilterRules};
pub use merge::{encode_label_value, merge_opacity_label, OPACITY_SOURCES};
pub use rle::{rle_decode, rle_encode, BinaryMask};
pub use split::{patient_level_split, SplitManifest, DEFAULT_TUNE_FRACTION};

pub const NO_FINDING: &str = "No Finding";
pub const SUPPORT_DEVICES: &str = "Support Devices";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ViewPosition {
    PA,
    AP,
    Lateral,
    Unknown,
}

impl ViewPosition {
    pub fn parse(s: &str) -> Self {
        match s.trim().to_ascii_uppercase().as_str() {
            "PA" => ViewPosition::PA,
            "AP" => ViewPosition::AP,
            "LATERAL" | "LL" | "LAT" => ViewPosition::Lateral,
            _ => ViewPosition::Unknown,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ViewPosition::PA => "PA",
            ViewPosition::AP => "AP",
            ViewPosition::Lateral => "Lateral",
            ViewPosition::Unknown => "Unknown",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sex {
    Female,
    Male,
    Other,
}

impl Sex {
    pub fn parse(s: &str) -> Self {
        match s.trim().to_ascii_lowercase().as_str() {
            "f" | "female" => Sex::Female,
            "m" | "male" => Sex::Male,
            _ => Sex::Other,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Sex::Female => "Female",
            Sex::Male => "Male",
            Sex::Other => "Unknown",
        }
    }
}

/// One study's ground truth plus the patient metadata used for splitting
/// and subgroup analysis.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelRecord {
    pub study_id: String,
    pub patient_id: String,
    pub view: ViewPosition,
    pub categories: BTreeMap<String, LabelState>,
    pub sex: Sex,
    pub age: u32,
}

impl LabelRecord {
    /// State of a category; absent categories read as `Empty`.
    pub fn state(&self, category: &str) -> LabelState {
        self.categories.get(category).copied().unwrap_or(LabelState::Empty)
    }
}
