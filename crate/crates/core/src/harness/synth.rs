//! Synthetic cohorts with known ground truth.
//!
//! Each finding of each study gets a ground-truth label drawn from its
//! prevalence. With probability `signal_strength` the detector output is
//! informative: its score lands above the cutpoint for positives and below
//! it for negatives. Otherwise the output is label-independent and lands
//! above or below the cutpoint with probability 1/2. Scores are continuous
//! within each side, so the expected per-finding AUROC is
//! `(1 + signal_strength) / 2`.

use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::domain::{
    default_paper_thresholds, FindingKind, FindingMap, LabelState, RawOutput, ScoreGrid, ScoredBox, SoftmaxPair,
    StudyOutputs, ThresholdConfig,
};
use crate::error::{Result, TrxError};
use crate::labelset::{LabelRecord, Sex, ViewPosition, NO_FINDING};
use crate::rng::{self, TrxRng};

use super::formats;
use super::labels_csv;

/// Side length of the synthetic activation maps.
const CAM_SIDE: usize = 8;
/// Streams above this offset belong to studies, below it to patients.
const STUDY_STREAM_BASE: u64 = 1 << 40;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct CohortSpec {
    pub n_studies: usize,
    pub prevalence: FindingMap<f64>,
    pub signal_strength: f64,
    pub image_dims: (usize, usize),
    pub seed: u64,
    /// Cutpoints the outputs are generated around; defaults to the
    /// published thresholds.
    #[serde(default)]
    pub thresholds: Option<ThresholdConfig>,
    /// Upper bound on studies per patient (uniform in `1..=max`).
    #[serde(default = "one")]
    pub max_studies_per_patient: usize,
}

fn one() -> usize {
    1
}

impl CohortSpec {
    pub fn new(n_studies: usize, prevalence: f64, signal_strength: f64, seed: u64) -> Self {
        CohortSpec {
            n_studies,
            prevalence: FindingMap::from_fn(|_| prevalence),
            signal_strength,
            image_dims: (64, 64),
            seed,
            thresholds: None,
            max_studies_per_patient: 1,
        }
    }

    pub fn thresholds(&self) -> ThresholdConfig {
        self.thresholds.unwrap_or_else(default_paper_thresholds)
    }

    fn validate(&self) -> Result<()> {
        if self.n_studies == 0 {
            return Err(TrxError::invalid("nStudies must be at least 1"));
        }
        if self.prevalence.values().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(TrxError::invalid("prevalences must lie in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.signal_strength) {
            return Err(TrxError::invalid("signalStrength must lie in [0, 1]"));
        }
        if self.max_studies_per_patient == 0 {
            return Err(TrxError::invalid("maxStudiesPerPatient must be at least 1"));
        }
        let (w, h) = self.image_dims;
        if w < 8 || h < 8 {
            return Err(TrxError::invalid("imageDims must be at least 8x8"));
        }
        let t = self.thresholds();
        let capacity = (w * h) as f64;
        let fc = t.cutpoint(FindingKind::Fracture);
        if !(fc > 0.0 && fc < 1.0) {
            return Err(TrxError::invalid(format!(
                "fracture cutpoint {fc} must lie in (0, 1) for synthesis"
            )));
        }
        for k in [FindingKind::Pneumothorax, FindingKind::PleuralEffusion] {
            let c = t.cutpoint(k);
            if c.is_nan() || c <= 0.0 || c * MASK_ABOVE.0 >= capacity * MASK_FILL_LIMIT {
                return Err(TrxError::invalid(format!(
                    "{w}x{h} images cannot hold a {k} mask above cutpoint {c}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthCohort {
    pub outputs: Vec<StudyOutputs>,
    pub labels: Vec<LabelRecord>,
    /// Activation map per study, aligned with `outputs`.
    pub cams: Vec<ScoreGrid>,
}

impl SynthCohort {
    /// Writes `<dir>/outputs/<study>/...` and `<dir>/labels.csv`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        let out_dir = dir.join("outputs");
        std::fs::create_dir_all(&out_dir).map_err(|e| TrxError::io(&out_dir, e))?;
        for (o, cam) in self.outputs.iter().zip(&self.cams) {
            formats::write_study(&out_dir, o, Some(cam))?;
        }
        labels_csv::write_labels(&dir.join("labels.csv"), &self.labels, &label_columns())
    }
}

/// Label columns written for synthetic cohorts.
pub fn label_columns() -> Vec<String> {
    let mut cols: Vec<String> = FindingKind::ALL.iter().map(|k| k.label_column().to_string()).collect();
    cols.push(NO_FINDING.to_string());
    cols
}

/// Multiplier range of the cutpoint for mask sums above it.
const MASK_ABOVE: (f64, f64) = (1.05, 1.5);
/// Largest share of the raster a synthetic blob may fill.
const MASK_FILL_LIMIT: f64 = 0.95;

pub fn synth_cohort(spec: &CohortSpec) -> Result<SynthCohort> {
    spec.validate()?;
    let thresholds = spec.thresholds();
    let mut cohort = SynthCohort {
        outputs: Vec::with_capacity(spec.n_studies),
        labels: Vec::with_capacity(spec.n_studies),
        cams: Vec::with_capacity(spec.n_studies),
    };
    let mut patient = 0u64;
    while cohort.outputs.len() < spec.n_studies {
        let mut prng = rng::substream(spec.seed, patient);
        let n_studies = prng.random_range(1..=spec.max_studies_per_patient);
        let sex = if prng.random_bool(0.5) { Sex::Female } else { Sex::Male };
        let age = prng.random_range(18..=90u32);
        for _ in 0..n_studies {
            let index = cohort.outputs.len();
            if index == spec.n_studies {
                break;
            }
            let mut srng = rng::substream(spec.seed, STUDY_STREAM_BASE + index as u64);
            let study_id = format!("S{index:06}");
            let (outputs, truth, cam) = synth_study(&study_id, spec, &thresholds, &mut srng)?;
            let mut categories: std::collections::BTreeMap<String, LabelState> = FindingKind::ALL
                .iter()
                .map(|&k| {
                    let state = if truth[k] {
                        LabelState::ConfirmedPositive
                    } else {
                        LabelState::ConfirmedNegative
                    };
                    (k.label_column().to_string(), state)
                })
                .collect();
            let normal = !truth.values().any(|&t| t);
            categories.insert(
                NO_FINDING.to_string(),
                if normal {
                    LabelState::ConfirmedPositive
                } else {
                    LabelState::ConfirmedNegative
                },
            );
            cohort.labels.push(LabelRecord {
                study_id,
                patient_id: format!("P{patient:06}"),
                view: ViewPosition::PA,
                categories,
                sex,
                age,
            });
            cohort.outputs.push(outputs);
            cohort.cams.push(cam);
        }
        patient += 1;
    }
    Ok(cohort)
}

fn synth_study(
    study_id: &str,
    spec: &CohortSpec,
    thresholds: &ThresholdConfig,
    rng: &mut TrxRng,
) -> Result<(StudyOutputs, FindingMap<bool>, ScoreGrid)> {
    let (w, h) = spec.image_dims;
    let mut truth = FindingMap::default();
    let mut outputs = Vec::with_capacity(4);
    let mut opacity_positive = 0.0;
    for kind in FindingKind::ALL {
        let label = rng.random_bool(spec.prevalence[kind]);
        truth[kind] = label;
        let above = if rng.random_bool(spec.signal_strength) {
            label
        } else {
            rng.random_bool(0.5)
        };
        let cut = thresholds.cutpoint(kind);
        let out = match kind {
            FindingKind::Pneumothorax | FindingKind::PleuralEffusion => {
                let capacity = (w * h) as f64 * MASK_FILL_LIMIT;
                let target = if above {
                    let hi = (cut * MASK_ABOVE.1).min(capacity);
                    rng.random_range(cut * MASK_ABOVE.0..hi)
                } else {
                    cut * rng.random_range(0.0..0.95)
                };
                RawOutput::MaskGrid(blob_mask(w, h, target, rng)?)
            }
            FindingKind::LungOpacity => {
                let pos = unit_score(cut, above, rng);
                opacity_positive = pos;
                RawOutput::SoftmaxPair(SoftmaxPair::new(1.0 - pos, pos)?)
            }
            FindingKind::Fracture => {
                let boxes = if above || rng.random_bool(0.5) {
                    vec![random_box(w, h, unit_score(cut, above, rng), rng)?]
                } else {
                    vec![]
                };
                RawOutput::BoxList(boxes)
            }
        };
        outputs.push(out);
    }
    let cam = blob_cam(opacity_positive, rng)?;
    let mut it = outputs.into_iter();
    let outputs = StudyOutputs::new(study_id, FindingMap::from_fn(|_| it.next().expect("four outputs")))?;
    Ok((outputs, truth, cam))
}

/// Score in `(cut, 1)` when `above`, otherwise in `(0, cut)`, kept away
/// from the interval ends.
fn unit_score(cut: f64, above: bool, rng: &mut TrxRng) -> f64 {
    let u = rng.random_range(0.05..0.95);
    if above {
        cut + (1.0 - cut) * u
    } else {
        cut * u
    }
}

/// Mask whose cell sum is `target`: the `ceil(target)` pixels nearest a
/// random center share the mass equally.
fn blob_mask(w: usize, h: usize, target: f64, rng: &mut TrxRng) -> Result<ScoreGrid> {
    let mut cells = vec![0.0f32; w * h];
    let k = target.ceil() as usize;
    if k > 0 {
        let (cx, cy) = (rng.random_range(0.0..w as f64), rng.random_range(0.0..h as f64));
        let mut order: Vec<(f64, usize)> = (0..w * h)
            .map(|i| {
                let (x, y) = ((i % w) as f64, (i / w) as f64);
                ((x - cx).powi(2) + (y - cy).powi(2), i)
            })
            .collect();
        order.select_nth_unstable_by(k - 1, |a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let value = (target / k as f64) as f32;
        for &(_, i) in &order[..k] {
            cells[i] = value;
        }
    }
    ScoreGrid::new(w, h, cells)
}

fn random_box(w: usize, h: usize, confidence: f64, rng: &mut TrxRng) -> Result<ScoredBox> {
    let (w, h) = (w as f64, h as f64);
    let bw = rng.random_range(0.1 * w..0.4 * w);
    let bh = rng.random_range(0.1 * h..0.4 * h);
    let x1 = rng.random_range(0.0..w - 1.0 - bw).floor();
    let y1 = rng.random_range(0.0..h - 1.0 - bh).floor();
    ScoredBox::new(x1, y1, x1 + bw.round(), y1 + bh.round(), confidence)
}

/// Gaussian bump of height `peak` on a small activation grid.
fn blob_cam(peak: f64, rng: &mut TrxRng) -> Result<ScoreGrid> {
    let (cx, cy) = (
        rng.random_range(1.0..CAM_SIDE as f64 - 1.0),
        rng.random_range(1.0..CAM_SIDE as f64 - 1.0),
    );
    let cells = (0..CAM_SIDE * CAM_SIDE)
        .map(|i| {
            let (x, y) = ((i % CAM_SIDE) as f64, (i / CAM_SIDE) as f64);
            let d2 = (x - cx).powi(2) + (y - cy).powi(2);
            (peak * (-d2 / 4.0).exp()) as f32
        })
        .collect();
    ScoreGrid::new(CAM_SIDE, CAM_SIDE, cells)
}
