use serde::{Deserialize, Serialize};

use crate::error::{Result, TrxError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
}

/// Staircase from `(0, 0)` to `(1, 1)`, one vertex per distinct score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
}

impl RocCurve {
    /// Trapezoidal area under the curve.
    pub fn area(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| (w[1].fpr - w[0].fpr) * (w[0].tpr + w[1].tpr) / 2.0)
            .sum()
    }
}

/// Cases sorted once by descending score and grouped into tie blocks, so
/// that ROC quantities for any case weighting (bootstrap multiplicities,
/// subgroup membership) are a single linear sweep.
#[derive(Debug, Clone)]
pub struct RankedCases {
    /// Original case indices, descending score.
    order: Vec<usize>,
    /// Exclusive end offsets into `order` for each tie block.
    block_ends: Vec<usize>,
    labels: Vec<bool>,
}

impl RankedCases {
    pub fn new(scores: &[f64], labels: &[bool]) -> Result<Self> {
        if scores.len() != labels.len() {
            return Err(TrxError::DimensionMismatch(format!(
                "{} scores vs {} labels",
                scores.len(),
                labels.len()
            )));
        }
        if let Some(s) = scores.iter().find(|s| s.is_nan()) {
            return Err(TrxError::invalid(format!("score {s} is NaN")));
        }
        let mut order: Vec<usize> = (0..scores.len()).collect();
        order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
        let mut block_ends = Vec::new();
        for i in 1..=order.len() {
            if i == order.len() || scores[order[i]] != scores[order[i - 1]] {
                block_ends.push(i);
            }
        }
        Ok(RankedCases {
            order,
            block_ends,
            labels: labels.to_vec(),
        })
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Cumulative weighted `(tp, fp)` after each tie block.
    fn sweep(&self, weight: impl Fn(usize) -> u64) -> Vec<(u64, u64)> {
        let mut out = Vec::with_capacity(self.block_ends.len());
        let (mut tp, mut fp) = (0u64, 0u64);
        let mut start = 0;
        for &end in &self.block_ends {
            for &i in &self.order[start..end] {
                let w = weight(i);
                if self.labels[i] {
                    tp += w;
                } else {
                    fp += w;
                }
            }
            out.push((tp, fp));
            start = end;
        }
        out
    }

    /// AUROC with case `i` counted `weight(i)` times; `None` when the
    /// weighted sample lacks a class. Tied positive/negative pairs earn half
    /// credit, which is exactly the trapezoid over diagonal tie segments.
    pub fn weighted_auroc(&self, weight: impl Fn(usize) -> u64) -> Option<f64> {
        let mut twice_area: u128 = 0;
        let (mut tp, mut fp) = (0u64, 0u64);
        let mut start = 0;
        for &end in &self.block_ends {
            let (mut bp, mut bn) = (0u64, 0u64);
            for &i in &self.order[start..end] {
                let w = weight(i);
                if self.labels[i] {
                    bp += w;
                } else {
                    bn += w;
                }
            }
            twice_area += bn as u128 * (2 * tp + bp) as u128;
            tp += bp;
            fp += bn;
            start = end;
        }
        if tp == 0 || fp == 0 {
            return None;
        }
        Some(twice_area as f64 / (2 * tp as u128 * fp as u128) as f64)
    }

    pub fn auroc(&self) -> Option<f64> {
        self.weighted_auroc(|_| 1)
    }

    pub fn roc_curve(&self) -> Option<RocCurve> {
        let sweep = self.sweep(|_| 1);
        let &(p, n) = sweep.last()?;
        if p == 0 || n == 0 {
            return None;
        }
        let mut points = vec![RocPoint { fpr: 0.0, tpr: 0.0 }];
        points.extend(sweep.iter().map(|&(tp, fp)| RocPoint {
            fpr: fp as f64 / n as f64,
            tpr: tp as f64 / p as f64,
        }));
        Some(RocCurve { points })
    }
}

fn single_class() -> TrxError {
    TrxError::degenerate("ROC needs at least one positive and one negative case")
}

/// ROC over all distinct-score thresholds with strict-greater binarization.
pub fn roc_curve(scores: &[f64], labels: &[bool]) -> Result<RocCurve> {
    RankedCases::new(scores, labels)?.roc_curve().ok_or_else(single_class)
}

pub fn auroc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    RankedCases::new(scores, labels)?.auroc().ok_or_else(single_class)
}
