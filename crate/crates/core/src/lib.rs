//! Late-fusion chest x-ray triage.
//!
//! Four per-finding detectors emit outputs of different shapes (pixel score
//! masks, a two-class softmax, scored bounding boxes). This crate turns those
//! outputs into scalar scores, binarizes them against calibrated cutpoints,
//! ORs the flags into a single abnormality verdict and fuses the per-finding
//! heat layers into one transparent overlay. Around that pipeline sit the
//! dataset tooling (label unification, RLE masks, patient-level splits), the
//! training-side numerics (losses, schedulers, samplers, augmentation) and
//! the evaluation statistics (ROC/AUROC, bootstrap intervals, subgroup
//! permutation tests).

pub mod compositor;
pub mod domain;
pub mod error;
pub mod fusion;
pub mod harness;
pub mod labelset;
pub mod metrics;
pub mod rng;
pub mod trainmath;

pub use domain::{
    default_paper_thresholds, FindingKind, FindingMap, LabelState, RawOutput, ScoreGrid, ScoredBox, SoftmaxPair,
    StudyOutputs, ThresholdConfig, TriageResult,
};
pub use error::{Result, TrxError};
