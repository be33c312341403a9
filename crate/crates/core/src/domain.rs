//! Finding taxonomy and the validated value types shared by every module.

use std::fmt;
use std::ops::{Index, IndexMut};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Result, TrxError};

/// Absolute tolerance on `negative + positive = 1` for a softmax pair.
pub const SOFTMAX_SUM_TOLERANCE: f64 = 1e-6;

/// The four radiological findings, in the fixed order used for compositing
/// and reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FindingKind {
    Pneumothorax,
    PleuralEffusion,
    LungOpacity,
    Fracture,
}

impl FindingKind {
    pub const ALL: [FindingKind; 4] = [
        FindingKind::Pneumothorax,
        FindingKind::PleuralEffusion,
        FindingKind::LungOpacity,
        FindingKind::Fracture,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Machine name used in file names and JSON keys.
    pub fn key(self) -> &'static str {
        match self {
            FindingKind::Pneumothorax => "pneumothorax",
            FindingKind::PleuralEffusion => "pleural_effusion",
            FindingKind::LungOpacity => "lung_opacity",
            FindingKind::Fracture => "fracture",
        }
    }

    /// Column name in label CSV files (CheXpert spelling).
    pub fn label_column(self) -> &'static str {
        match self {
            FindingKind::Pneumothorax => "Pneumothorax",
            FindingKind::PleuralEffusion => "Pleural Effusion",
            FindingKind::LungOpacity => "Lung Opacity",
            FindingKind::Fracture => "Fracture",
        }
    }

    /// Which raw-output shape the detector for this finding produces.
    pub fn output_kind(self) -> OutputKind {
        match self {
            FindingKind::Pneumothorax | FindingKind::PleuralEffusion => OutputKind::MaskGrid,
            FindingKind::LungOpacity => OutputKind::SoftmaxPair,
            FindingKind::Fracture => OutputKind::BoxList,
        }
    }
}

impl fmt::Display for FindingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for FindingKind {
    type Err = TrxError;

    fn from_str(s: &str) -> Result<Self> {
        let norm: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .map(|c| c.to_ascii_lowercase())
            .collect();
        FindingKind::ALL
            .into_iter()
            .find(|k| k.key().replace('_', "") == norm)
            .ok_or_else(|| TrxError::invalid(format!("unknown finding {s:?}")))
    }
}

/// A total map from [`FindingKind`] to `T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct FindingMap<T>([T; 4]);

impl<T> FindingMap<T> {
    pub fn from_fn(mut f: impl FnMut(FindingKind) -> T) -> Self {
        FindingMap(FindingKind::ALL.map(&mut f))
    }

    pub fn iter(&self) -> impl Iterator<Item = (FindingKind, &T)> {
        FindingKind::ALL.into_iter().zip(self.0.iter())
    }

    pub fn values(&self) -> impl Iterator<Item = &T> {
        self.0.iter()
    }

    pub fn map<U>(&self, mut f: impl FnMut(FindingKind, &T) -> U) -> FindingMap<U> {
        FindingMap::from_fn(|k| f(k, &self[k]))
    }
}

impl<T> Index<FindingKind> for FindingMap<T> {
    type Output = T;

    fn index(&self, kind: FindingKind) -> &T {
        &self.0[kind.index()]
    }
}

impl<T> IndexMut<FindingKind> for FindingMap<T> {
    fn index_mut(&mut self, kind: FindingKind) -> &mut T {
        &mut self.0[kind.index()]
    }
}

impl<T: Serialize> Serialize for FindingMap<T> {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = serializer.serialize_map(Some(4))?;
        for (k, v) in self.iter() {
            map.serialize_entry(k.key(), v)?;
        }
        map.end()
    }
}

impl<'de, T: Deserialize<'de>> Deserialize<'de> for FindingMap<T> {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let mut entries: std::collections::BTreeMap<FindingKind, T> =
            std::collections::BTreeMap::deserialize(deserializer)?;
        let mut out = Vec::with_capacity(4);
        for k in FindingKind::ALL {
            out.push(
                entries
                    .remove(&k)
                    .ok_or_else(|| D::Error::custom(format!("missing finding {}", k.key())))?,
            );
        }
        let arr: [T; 4] = out.try_into().unwrap_or_else(|_| unreachable!("exactly four findings"));
        Ok(FindingMap(arr))
    }
}

/// Ground-truth state of one label category, CheXpert style.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LabelState {
    ConfirmedPositive,
    ConfirmedNegative,
    Uncertain,
    Empty,
}

impl LabelState {
    pub const ALL: [LabelState; 4] = [
        LabelState::ConfirmedPositive,
        LabelState::ConfirmedNegative,
        LabelState::Uncertain,
        LabelState::Empty,
    ];

    /// Parses the CSV encoding `1` / `0` / `-1` / blank. `1.0`, `0.0` and
    /// `-1.0` are accepted too.
    pub fn parse_code(s: &str) -> Result<Self> {
        match s.trim() {
            "" => Ok(LabelState::Empty),
            "1" | "1.0" => Ok(LabelState::ConfirmedPositive),
            "0" | "0.0" => Ok(LabelState::ConfirmedNegative),
            "-1" | "-1.0" => Ok(LabelState::Uncertain),
            other => Err(TrxError::invalid(format!("malformed label state {other:?}"))),
        }
    }

    pub fn code(self) -> &'static str {
        match self {
            LabelState::ConfirmedPositive => "1",
            LabelState::ConfirmedNegative => "0",
            LabelState::Uncertain => "-1",
            LabelState::Empty => "",
        }
    }

    pub fn is_positive(self) -> bool {
        self == LabelState::ConfirmedPositive
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputKind {
    MaskGrid,
    SoftmaxPair,
    BoxList,
}

/// Row-major grid of unit-interval scores.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreGrid {
    width: usize,
    height: usize,
    cells: Vec<f32>,
}

impl ScoreGrid {
    pub fn new(width: usize, height: usize, cells: Vec<f32>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(TrxError::invalid("grid dimensions must be positive"));
        }
        if cells.len() != width * height {
            return Err(TrxError::DimensionMismatch(format!(
                "{}x{} grid needs {} cells, got {}",
                width,
                height,
                width * height,
                cells.len()
            )));
        }
        if let Some((i, v)) = cells.iter().enumerate().find(|(_, v)| !(0.0..=1.0).contains(*v)) {
            return Err(TrxError::invalid(format!("value out of range: cell {i} = {v}")));
        }
        Ok(ScoreGrid { width, height, cells })
    }

    pub fn zeros(width: usize, height: usize) -> Result<Self> {
        ScoreGrid::new(width, height, vec![0.0; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn cells(&self) -> &[f32] {
        &self.cells
    }

    pub fn get(&self, x: usize, y: usize) -> f32 {
        self.cells[y * self.width + x]
    }
}

/// Two-class softmax output: `(negative, positive)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SoftmaxPair {
    negative: f64,
    positive: f64,
}

impl SoftmaxPair {
    pub fn new(negative: f64, positive: f64) -> Result<Self> {
        for v in [negative, positive] {
            if !(0.0..=1.0).contains(&v) {
                return Err(TrxError::invalid(format!("value out of range: softmax component {v}")));
            }
        }
        if (negative + positive - 1.0).abs() > SOFTMAX_SUM_TOLERANCE {
            return Err(TrxError::invalid(format!(
                "softmax pair ({negative}, {positive}) does not sum to 1"
            )));
        }
        Ok(SoftmaxPair { negative, positive })
    }

    pub fn negative(&self) -> f64 {
        self.negative
    }

    pub fn positive(&self) -> f64 {
        self.positive
    }
}

/// Detector box in pixel coordinates with its confidence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredBox {
    x1: f64,
    y1: f64,
    x2: f64,
    y2: f64,
    confidence: f64,
}

impl ScoredBox {
    pub fn new(x1: f64, y1: f64, x2: f64, y2: f64, confidence: f64) -> Result<Self> {
        if ![x1, y1, x2, y2].iter().all(|v| v.is_finite()) || !(x1 < x2 && y1 < y2) {
            return Err(TrxError::invalid(format!(
                "box ({x1}, {y1}, {x2}, {y2}) is not ordered"
            )));
        }
        if !(0.0..=1.0).contains(&confidence) {
            return Err(TrxError::invalid(format!(
                "value out of range: box confidence {confidence}"
            )));
        }
        Ok(ScoredBox {
            x1,
            y1,
            x2,
            y2,
            confidence,
        })
    }

    pub fn x1(&self) -> f64 {
        self.x1
    }
    pub fn y1(&self) -> f64 {
        self.y1
    }
    pub fn x2(&self) -> f64 {
        self.x2
    }
    pub fn y2(&self) -> f64 {
        self.y2
    }
    pub fn confidence(&self) -> f64 {
        self.confidence
    }
}

/// Native output of one finding detector. Constructors of the payload types
/// enforce their invariants, so a `RawOutput` is always valid.
#[derive(Debug, Clone, PartialEq)]
pub enum RawOutput {
    MaskGrid(ScoreGrid),
    SoftmaxPair(SoftmaxPair),
    BoxList(Vec<ScoredBox>),
}

impl RawOutput {
    pub fn kind(&self) -> OutputKind {
        match self {
            RawOutput::MaskGrid(_) => OutputKind::MaskGrid,
            RawOutput::SoftmaxPair(_) => OutputKind::SoftmaxPair,
            RawOutput::BoxList(_) => OutputKind::BoxList,
        }
    }
}

/// All four detector outputs for one study.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyOutputs {
    study_id: String,
    per_finding: FindingMap<RawOutput>,
}

impl StudyOutputs {
    pub fn new(study_id: impl Into<String>, per_finding: FindingMap<RawOutput>) -> Result<Self> {
        let study_id = study_id.into();
        if study_id.is_empty() {
            return Err(TrxError::invalid("empty study id"));
        }
        for (k, out) in per_finding.iter() {
            if out.kind() != k.output_kind() {
                return Err(TrxError::invalid(format!(
                    "study {study_id}: {k} expects {:?}, got {:?}",
                    k.output_kind(),
                    out.kind()
                )));
            }
        }
        Ok(StudyOutputs { study_id, per_finding })
    }

    pub fn study_id(&self) -> &str {
        &self.study_id
    }

    pub fn get(&self, kind: FindingKind) -> &RawOutput {
        &self.per_finding[kind]
    }

    pub fn per_finding(&self) -> &FindingMap<RawOutput> {
        &self.per_finding
    }
}

/// Per-study verdict. `abnormal` is always the OR of `flags`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TriageResult {
    pub study_id: String,
    pub scores: FindingMap<f64>,
    pub flags: FindingMap<bool>,
    pub abnormal: bool,
}

impl TriageResult {
    pub fn is_consistent(&self) -> bool {
        self.abnormal == self.flags.values().any(|&f| f)
    }
}

/// Per-finding cutpoints applied to the scalar score of each output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdConfig {
    cutpoints: FindingMap<f64>,
}

impl ThresholdConfig {
    pub fn new(cutpoints: FindingMap<f64>) -> Result<Self> {
        for (k, &c) in cutpoints.iter() {
            if !c.is_finite() {
                return Err(TrxError::invalid(format!("cutpoint for {k} is not finite")));
            }
        }
        let op = cutpoints[FindingKind::LungOpacity];
        if !(op > 0.0 && op < 1.0) {
            return Err(TrxError::invalid(format!(
                "softmax cutpoint must lie in (0, 1), got {op}"
            )));
        }
        Ok(ThresholdConfig { cutpoints })
    }

    pub fn cutpoint(&self, kind: FindingKind) -> f64 {
        self.cutpoints[kind]
    }

    pub fn cutpoints(&self) -> &FindingMap<f64> {
        &self.cutpoints
    }

    pub fn with_cutpoint(&self, kind: FindingKind, value: f64) -> Result<Self> {
        let mut c = self.cutpoints;
        c[kind] = value;
        ThresholdConfig::new(c)
    }
}

impl<'de> Deserialize<'de> for ThresholdConfig {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            cutpoints: FindingMap<f64>,
        }
        let raw = Raw::deserialize(deserializer)?;
        ThresholdConfig::new(raw.cutpoints).map_err(serde::de::Error::custom)
    }
}

/// The cutpoints the published detectors were deployed with: pixel-sum
/// thresholds for the two segmentation models, the opacity softmax cut and
/// the maximum box confidence cut.
pub fn default_paper_thresholds() -> ThresholdConfig {
    let mut c = FindingMap::default();
    c[FindingKind::Pneumothorax] = 144.43;
    c[FindingKind::PleuralEffusion] = 3440.5;
    c[FindingKind::LungOpacity] = 0.98;
    c[FindingKind::Fracture] = 0.15;
    ThresholdConfig { cutpoints: c }
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        default_paper_thresholds()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inert_outputs() -> FindingMap<RawOutput> {
        FindingMap::from_fn(|k| match k.output_kind() {
            OutputKind::MaskGrid => RawOutput::MaskGrid(ScoreGrid::zeros(4, 4).unwrap()),
            OutputKind::SoftmaxPair => RawOutput::SoftmaxPair(SoftmaxPair::new(1.0, 0.0).unwrap()),
            OutputKind::BoxList => RawOutput::BoxList(vec![]),
        })
    }

    #[test]
    fn published_thresholds_are_pinned() {
        let t = default_paper_thresholds();
        assert_eq!(t.cutpoint(FindingKind::PleuralEffusion), 3440.5);
        assert_eq!(t.cutpoint(FindingKind::Pneumothorax), 144.43);
        assert_eq!(t.cutpoint(FindingKind::LungOpacity), 0.98);
        assert_eq!(t.cutpoint(FindingKind::Fracture), 0.15);
    }

    #[test]
    fn mismatched_kind_is_rejected() {
        let mut outs = inert_outputs();
        outs[FindingKind::Pneumothorax] = RawOutput::BoxList(vec![]);
        assert!(StudyOutputs::new("s1", outs).is_err());
        assert!(StudyOutputs::new("s1", inert_outputs()).is_ok());
    }

    #[test]
    fn raw_output_invariants() {
        assert!(ScoreGrid::new(2, 1, vec![0.0, 1.5]).is_err());
        assert!(ScoreGrid::new(2, 2, vec![0.0; 3]).is_err());
        assert!(SoftmaxPair::new(0.02, 0.98).is_ok());
        assert!(SoftmaxPair::new(0.3, 0.6).is_err());
        assert!(SoftmaxPair::new(0.5 + 5e-7, 0.5).is_ok());
        assert!(ScoredBox::new(5.0, 1.0, 5.0, 3.0, 0.5).is_err());
        assert!(ScoredBox::new(1.0, 1.0, 5.0, 3.0, 1.1).is_err());
    }

    #[test]
    fn thresholds_reject_bad_softmax_cut() {
        let t = default_paper_thresholds();
        assert!(t.with_cutpoint(FindingKind::LungOpacity, 1.0).is_err());
        assert!(t.with_cutpoint(FindingKind::Fracture, f64::NAN).is_err());
        assert!(t.with_cutpoint(FindingKind::Fracture, 0.3).is_ok());
    }

    #[test]
    fn threshold_json_round_trip() {
        let t = default_paper_thresholds();
        let s = serde_json::to_string(&t).unwrap();
        let back: ThresholdConfig = serde_json::from_str(&s).unwrap();
        assert_eq!(t, back);
        assert!(serde_json::from_str::<ThresholdConfig>(
            r#"{"cutpoints":{"pneumothorax":1,"pleural_effusion":1,"lung_opacity":2,"fracture":1}}"#
        )
        .is_err());
    }

    #[test]
    fn finding_names_parse() {
        assert_eq!(
            "Pleural Effusion".parse::<FindingKind>().unwrap(),
            FindingKind::PleuralEffusion
        );
        assert_eq!("lung_opacity".parse::<FindingKind>().unwrap(), FindingKind::LungOpacity);
        assert!("cardiomegaly".parse::<FindingKind>().is_err());
    }
}
