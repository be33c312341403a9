//! Score extraction, binarization, cutpoint calibration and the OR fusion.

use crate::domain::{FindingMap, RawOutput, StudyOutputs, ThresholdConfig, TriageResult};
use crate::error::{Result, TrxError};

/// Scalar score of a raw output: pixel sum for masks, positive-class
/// probability for a softmax pair, maximum confidence for boxes (0 when no
/// box was detected).
pub fn score_of(output: &RawOutput) -> f64 {
    match output {
        RawOutput::MaskGrid(grid) => grid.cells().iter().map(|&v| v as f64).sum(),
        RawOutput::SoftmaxPair(pair) => pair.positive(),
        RawOutput::BoxList(boxes) => boxes.iter().map(|b| b.confidence()).fold(0.0, f64::max),
    }
}

/// Positive iff the score is strictly above the cutpoint.
pub fn binarize(score: f64, cutpoint: f64) -> bool {
    score > cutpoint
}

pub fn fuse_abnormality(flags: &FindingMap<bool>) -> bool {
    flags.values().any(|&f| f)
}

pub fn run_pipeline(outputs: &StudyOutputs, cfg: &ThresholdConfig) -> TriageResult {
    let scores = outputs.per_finding().map(|_, out| score_of(out));
    let flags = scores.map(|k, &s| binarize(s, cfg.cutpoint(k)));
    TriageResult {
        study_id: outputs.study_id().to_string(),
        scores,
        abnormal: fuse_abnormality(&flags),
        flags,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredCase {
    pub score: f64,
    pub label: bool,
}

impl ScoredCase {
    pub fn new(score: f64, label: bool) -> Self {
        ScoredCase { score, label }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationReport {
    pub cutpoint: f64,
    pub sensitivity: f64,
    pub specificity: f64,
    /// Youden's J at the cutpoint.
    pub youden_j: f64,
}

/// Midpoint of two consecutive distinct scores, kept strictly below `hi` so
/// that strict-greater binarization still separates them.
pub(crate) fn midpoint(lo: f64, hi: f64) -> f64 {
    let m = lo + (hi - lo) / 2.0;
    if m < hi {
        m
    } else {
        lo
    }
}

/// Youden-optimal cutpoint over `-inf`, `+inf` and the midpoints between
/// consecutive distinct scores. Ties in J go to the smallest cutpoint.
pub fn calibrate_threshold(cases: &[ScoredCase]) -> Result<CalibrationReport> {
    if let Some(c) = cases.iter().find(|c| !c.score.is_finite()) {
        return Err(TrxError::invalid(format!("non-finite score {}", c.score)));
    }
    let positives = cases.iter().filter(|c| c.label).count() as i64;
    let negatives = cases.len() as i64 - positives;
    if positives == 0 || negatives == 0 {
        return Err(TrxError::degenerate("degenerate tuning set"));
    }

    let mut sorted = cases.to_vec();
    sorted.sort_by(|a, b| a.score.total_cmp(&b.score));

    // J scaled by P*N stays an integer, so ties compare exactly.
    let scaled_j = |tp: i64, tn: i64| tp * negatives + tn * positives - positives * negatives;

    // Cutpoint -inf: everything positive.
    let (mut tp, mut tn) = (positives, 0i64);
    let mut best = (scaled_j(tp, tn), f64::NEG_INFINITY, tp, tn);
    let mut i = 0;
    while i < sorted.len() {
        let score = sorted[i].score;
        while i < sorted.len() && sorted[i].score == score {
            if sorted[i].label {
                tp -= 1;
            } else {
                tn += 1;
            }
            i += 1;
        }
        let cut = if i < sorted.len() {
            midpoint(score, sorted[i].score)
        } else {
            f64::INFINITY
        };
        let j = scaled_j(tp, tn);
        if j > best.0 {
            best = (j, cut, tp, tn);
        }
    }

    let (j, cutpoint, tp, tn) = best;
    Ok(CalibrationReport {
        cutpoint,
        sensitivity: tp as f64 / positives as f64,
        specificity: tn as f64 / negatives as f64,
        youden_j: j as f64 / (positives * negatives) as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{default_paper_thresholds, FindingKind, ScoreGrid, ScoredBox, SoftmaxPair};

    fn cases(scores: &[f64], labels: &[bool]) -> Vec<ScoredCase> {
        scores
            .iter()
            .zip(labels)
            .map(|(&s, &l)| ScoredCase::new(s, l))
            .collect()
    }

    #[test]
    fn scores_per_output_kind() {
        let grid = ScoreGrid::zeros(1024, 1024).unwrap();
        assert_eq!(score_of(&RawOutput::MaskGrid(grid)), 0.0);
        let pair = SoftmaxPair::new(0.02, 0.98).unwrap();
        assert_eq!(score_of(&RawOutput::SoftmaxPair(pair)), 0.98);
        let boxes = [0.1, 0.4, 0.2]
            .iter()
            .map(|&c| ScoredBox::new(0.0, 0.0, 2.0, 2.0, c).unwrap())
            .collect();
        assert_eq!(score_of(&RawOutput::BoxList(boxes)), 0.4);
        assert_eq!(score_of(&RawOutput::BoxList(vec![])), 0.0);
    }

    #[test]
    fn strict_binarization() {
        assert!(binarize(3441.0, 3440.5));
        assert!(!binarize(144.43, 144.43));
        assert!(!binarize(0.0, 0.15));
    }

    #[test]
    fn or_truth_table() {
        for bits in 0u8..16 {
            let flags = FindingMap::from_fn(|k| bits >> k.index() & 1 == 1);
            assert_eq!(fuse_abnormality(&flags), bits != 0);
        }
    }

    fn inert(pneumothorax_cell: f32) -> StudyOutputs {
        // half of the 400 cells carry the value
        let cells = (0..400)
            .map(|i| if i < 200 { pneumothorax_cell } else { 0.0 })
            .collect();
        let ptx = ScoreGrid::new(20, 20, cells).unwrap();
        StudyOutputs::new(
            "s",
            FindingMap::from_fn(|k| match k {
                FindingKind::Pneumothorax => RawOutput::MaskGrid(ptx.clone()),
                FindingKind::PleuralEffusion => RawOutput::MaskGrid(ScoreGrid::zeros(20, 20).unwrap()),
                FindingKind::LungOpacity => RawOutput::SoftmaxPair(SoftmaxPair::new(1.0, 0.0).unwrap()),
                FindingKind::Fracture => RawOutput::BoxList(vec![]),
            }),
        )
        .unwrap()
    }

    #[test]
    fn pipeline_inert_and_pneumothorax() {
        let cfg = default_paper_thresholds();
        let r = run_pipeline(&inert(0.0), &cfg);
        assert!(!r.abnormal);
        assert!(r.flags.values().all(|f| !f));

        let r = run_pipeline(&inert(1.0), &cfg);
        assert_eq!(r.scores[FindingKind::Pneumothorax], 200.0);
        assert!(r.flags[FindingKind::Pneumothorax]);
        assert!(!r.flags[FindingKind::PleuralEffusion]);
        assert!(!r.flags[FindingKind::LungOpacity]);
        assert!(!r.flags[FindingKind::Fracture]);
        assert!(r.abnormal && r.is_consistent());
    }

    #[test]
    fn calibration_separable() {
        let r = calibrate_threshold(&cases(&[0.2, 0.3, 0.7, 0.9], &[false, false, true, true])).unwrap();
        assert!((r.cutpoint - 0.5).abs() < 1e-12);
        assert_eq!(r.youden_j, 1.0);
        assert_eq!((r.sensitivity, r.specificity), (1.0, 1.0));
    }

    #[test]
    fn calibration_tie_break_takes_smallest_cut() {
        let r = calibrate_threshold(&cases(&[0.1, 0.35, 0.4, 0.8], &[false, true, false, true])).unwrap();
        assert_eq!(r.youden_j, 0.5);
        assert!((r.cutpoint - 0.225).abs() < 1e-12);
    }

    #[test]
    fn calibration_rejects_single_class() {
        let e = calibrate_threshold(&cases(&[0.1, 0.2], &[true, true])).unwrap_err();
        assert!(e.is_degenerate());
        assert!(e.to_string().contains("degenerate tuning set"));
    }

    #[test]
    fn calibration_uninformative_returns_minus_infinity() {
        let r = calibrate_threshold(&cases(&[0.5, 0.5], &[true, false])).unwrap();
        assert_eq!(r.cutpoint, f64::NEG_INFINITY);
        assert_eq!(r.youden_j, 0.0);
    }

    #[test]
    fn midpoint_of_adjacent_floats_stays_below_upper() {
        let lo = 1.0f64;
        let hi = f64::from_bits(lo.to_bits() + 1);
        let m = midpoint(lo, hi);
        assert!(m < hi && m >= lo);
    }
}
