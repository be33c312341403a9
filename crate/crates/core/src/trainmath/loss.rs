use crate::error::{Result, TrxError};

/// Predictions are clamped to `[PRED_EPS, 1 - PRED_EPS]`.
pub const PRED_EPS: f64 = 1e-7;

/// Probabilities and (possibly soft) targets of equal length.
#[derive(Debug, Clone, PartialEq)]
pub struct PredTarget {
    pred: Vec<f64>,
    target: Vec<f64>,
}

impl PredTarget {
    pub fn new(pred: Vec<f64>, target: Vec<f64>) -> Result<Self> {
        if pred.len() != target.len() {
            return Err(TrxError::DimensionMismatch(format!(
                "{} predictions vs {} targets",
                pred.len(),
                target.len()
            )));
        }
        if pred.is_empty() {
            return Err(TrxError::invalid("empty prediction"));
        }
        if pred.iter().any(|p| p.is_nan()) {
            return Err(TrxError::invalid("NaN prediction"));
        }
        if let Some(t) = target.iter().find(|t| !(0.0..=1.0).contains(*t)) {
            return Err(TrxError::invalid(format!("target {t} outside [0, 1]")));
        }
        let pred = pred.into_iter().map(|p| p.clamp(PRED_EPS, 1.0 - PRED_EPS)).collect();
        Ok(PredTarget { pred, target })
    }

    pub fn pred(&self) -> &[f64] {
        &self.pred
    }

    pub fn target(&self) -> &[f64] {
        &self.target
    }

    fn len(&self) -> f64 {
        self.pred.len() as f64
    }

    fn pairs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.pred.iter().copied().zip(self.target.iter().copied())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LossValueGrad {
    pub value: f64,
    /// Derivative of `value` with respect to each (clamped) prediction.
    pub grad: Vec<f64>,
}

pub fn bce_loss(pt: &PredTarget) -> LossValueGrad {
    let n = pt.len();
    let value = pt
        .pairs()
        .map(|(p, t)| -(t * p.ln() + (1.0 - t) * (1.0 - p).ln()))
        .sum::<f64>()
        / n;
    let grad = pt.pairs().map(|(p, t)| (p - t) / (p * (1.0 - p)) / n).collect();
    LossValueGrad { value, grad }
}

/// Mean of `-a t (1-p)^g ln p - (1-a)(1-t) p^g ln(1-p)`.
pub fn focal_loss(pt: &PredTarget, gamma: f64, alpha: f64) -> Result<LossValueGrad> {
    if gamma.is_nan() || gamma < 0.0 || !(0.0..=1.0).contains(&alpha) {
        return Err(TrxError::invalid(format!(
            "focal parameters out of range: gamma {gamma}, alpha {alpha}"
        )));
    }
    let n = pt.len();
    let mut value = 0.0;
    let mut grad = Vec::with_capacity(pt.pred.len());
    for (p, t) in pt.pairs() {
        let q = 1.0 - p;
        let (ln_p, ln_q) = (p.ln(), q.ln());
        let pos_w = alpha * t;
        let neg_w = (1.0 - alpha) * (1.0 - t);
        value += -pos_w * q.powf(gamma) * ln_p - neg_w * p.powf(gamma) * ln_q;
        // d/dp [(1-p)^g ln p] = -g (1-p)^(g-1) ln p + (1-p)^g / p
        // d/dp [p^g ln(1-p)]  =  g p^(g-1) ln(1-p) - p^g / (1-p)
        let (d_pos, d_neg) = if gamma == 0.0 {
            (1.0 / p, -1.0 / q)
        } else {
            (
                -gamma * q.powf(gamma - 1.0) * ln_p + q.powf(gamma) / p,
                gamma * p.powf(gamma - 1.0) * ln_q - p.powf(gamma) / q,
            )
        };
        grad.push((-pos_w * d_pos - neg_w * d_neg) / n);
    }
    Ok(LossValueGrad { value: value / n, grad })
}

/// `1 - (2 sum(p t) + s) / (sum(p) + sum(t) + s)`.
pub fn dice_loss(pt: &PredTarget, smooth: f64) -> Result<LossValueGrad> {
    if smooth.is_nan() || smooth <= 0.0 {
        return Err(TrxError::invalid(format!(
            "dice smoothing must be positive, got {smooth}"
        )));
    }
    let inter: f64 = pt.pairs().map(|(p, t)| p * t).sum();
    let total: f64 = pt.pred.iter().sum::<f64>() + pt.target.iter().sum::<f64>();
    let num = 2.0 * inter + smooth;
    let den = total + smooth;
    let grad = pt
        .target
        .iter()
        .map(|&t| -(2.0 * t * den - num) / (den * den))
        .collect();
    Ok(LossValueGrad {
        value: 1.0 - num / den,
        grad,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CombinedLossConfig {
    /// Weights of (BCE, focal, dice).
    pub weights: (f64, f64, f64),
    pub focal_gamma: f64,
    pub focal_alpha: f64,
    pub dice_smooth: f64,
}

impl Default for CombinedLossConfig {
    fn default() -> Self {
        CombinedLossConfig {
            weights: (3.0, 4.0, 1.0),
            focal_gamma: 2.0,
            focal_alpha: 0.25,
            dice_smooth: 1.0,
        }
    }
}

/// Weighted sum of BCE, focal and dice losses (and gradients).
pub fn combined_loss(pt: &PredTarget, cfg: &CombinedLossConfig) -> Result<LossValueGrad> {
    let (wb, wf, wd) = cfg.weights;
    let b = bce_loss(pt);
    let f = focal_loss(pt, cfg.focal_gamma, cfg.focal_alpha)?;
    let d = dice_loss(pt, cfg.dice_smooth)?;
    let grad = b
        .grad
        .iter()
        .zip(&f.grad)
        .zip(&d.grad)
        .map(|((gb, gf), gd)| wb * gb + wf * gf + wd * gd)
        .collect();
    Ok(LossValueGrad {
        value: wb * b.value + wf * f.value + wd * d.value,
        grad,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(p: &[f64], t: &[f64]) -> PredTarget {
        PredTarget::new(p.to_vec(), t.to_vec()).unwrap()
    }

    #[test]
    fn bce_closed_forms() {
        assert!(bce_loss(&pt(&[1.0, 0.0, 1.0], &[1.0, 0.0, 1.0])).value <= 1e-6);
        let v = bce_loss(&pt(&[0.5; 4], &[1.0; 4])).value;
        assert!((v - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn focal_reduces_to_half_bce() {
        let x = pt(&[0.2, 0.7, 0.9, 0.4], &[0.0, 1.0, 0.6, 0.01]);
        let f = focal_loss(&x, 0.0, 0.5).unwrap();
        let b = bce_loss(&x);
        assert!((f.value - 0.5 * b.value).abs() < 1e-15);
        for (gf, gb) in f.grad.iter().zip(&b.grad) {
            assert!((gf - 0.5 * gb).abs() < 1e-12);
        }
        assert!(focal_loss(&pt(&[1.0], &[1.0]), 2.0, 0.25).unwrap().value < 1e-6);
        assert!(focal_loss(&x, -1.0, 0.5).is_err());
    }

    #[test]
    fn dice_degenerate_and_perfect() {
        let d = dice_loss(&pt(&[0.0; 5], &[0.0; 5]), 1.0).unwrap();
        // Clamping leaves 5e-7 of predicted mass.
        assert!(d.value.abs() < 1e-6);
        let d = dice_loss(&pt(&[1.0, 0.0, 1.0, 1.0], &[1.0, 0.0, 1.0, 1.0]), 1.0).unwrap();
        assert!(d.value.abs() < 1e-6);
        assert!(dice_loss(&pt(&[0.5], &[1.0]), 0.0).is_err());
    }

    #[test]
    fn shape_mismatch() {
        assert!(PredTarget::new(vec![0.5], vec![0.5, 0.5]).is_err());
        assert!(PredTarget::new(vec![0.5], vec![1.5]).is_err());
    }

    #[test]
    fn combined_projection() {
        let x = pt(&[0.2, 0.7, 0.9], &[0.0, 1.0, 0.6]);
        let cfg = CombinedLossConfig {
            weights: (1.0, 0.0, 0.0),
            ..Default::default()
        };
        let c = combined_loss(&x, &cfg).unwrap();
        let b = bce_loss(&x);
        assert_eq!(c.value, b.value);
        assert_eq!(c.grad, b.grad);
    }
}
