use serde::{Deserialize, Serialize};

use crate::error::{Result, TrxError};
use crate::labelset::BinaryMask;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    pub fn_: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn record(&mut self, pred: bool, label: bool, weight: u64) {
        match (pred, label) {
            (true, true) => self.tp += weight,
            (true, false) => self.fp += weight,
            (false, false) => self.tn += weight,
            (false, true) => self.fn_ += weight,
        }
    }
}

pub fn confusion_counts(preds: &[bool], labels: &[bool]) -> Result<ConfusionCounts> {
    if preds.len() != labels.len() {
        return Err(TrxError::DimensionMismatch(format!(
            "{} predictions vs {} labels",
            preds.len(),
            labels.len()
        )));
    }
    if preds.is_empty() {
        return Err(TrxError::invalid("no predictions"));
    }
    let mut c = ConfusionCounts::default();
    for (&p, &l) in preds.iter().zip(labels) {
        c.record(p, l, 1);
    }
    Ok(c)
}

/// `None` marks a metric whose denominator is zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticMetrics {
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
    pub ppv: Option<f64>,
    pub npv: Option<f64>,
}

impl DiagnosticMetrics {
    pub fn as_array(&self) -> [Option<f64>; 4] {
        [self.sensitivity, self.specificity, self.ppv, self.npv]
    }
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

pub fn diagnostic_metrics(c: &ConfusionCounts) -> DiagnosticMetrics {
    DiagnosticMetrics {
        sensitivity: ratio(c.tp, c.tp + c.fn_),
        specificity: ratio(c.tn, c.tn + c.fp),
        ppv: ratio(c.tp, c.tp + c.fp),
        npv: ratio(c.tn, c.tn + c.fn_),
    }
}

/// `2|A∩B| / (|A| + |B|)`, defined as 1 when both masks are empty.
pub fn dice_score(pred: &BinaryMask, gt: &BinaryMask) -> Result<f64> {
    if (pred.width(), pred.height()) != (gt.width(), gt.height()) {
        return Err(TrxError::DimensionMismatch(format!(
            "{}x{} vs {}x{}",
            pred.width(),
            pred.height(),
            gt.width(),
            gt.height()
        )));
    }
    let inter = pred.bits().iter().zip(gt.bits()).filter(|(a, b)| **a && **b).count();
    let total = pred.count() + gt.count();
    Ok(if total == 0 {
        1.0
    } else {
        2.0 * inter as f64 / total as f64
    })
}
