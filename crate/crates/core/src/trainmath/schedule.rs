use crate::error::{Result, TrxError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlateauMode {
    /// Lower metric is better (losses).
    Min,
    /// Higher metric is better (DICE, AUROC).
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlateauConfig {
    pub factor: f64,
    pub patience: u32,
    pub mode: PlateauMode,
}

impl PlateauConfig {
    pub fn new(factor: f64, patience: u32, mode: PlateauMode) -> Result<Self> {
        if !(factor > 0.0 && factor < 1.0) {
            return Err(TrxError::invalid(format!("plateau factor {factor} outside (0, 1)")));
        }
        Ok(PlateauConfig { factor, patience, mode })
    }
}

impl Default for PlateauConfig {
    /// Ten-fold reduction after two epochs without improvement.
    fn default() -> Self {
        PlateauConfig {
            factor: 0.1,
            patience: 2,
            mode: PlateauMode::Min,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchedulerState {
    pub lr: f64,
    pub best_metric: f64,
    pub epochs_since_improve: u32,
}

impl SchedulerState {
    pub fn new(lr: f64, mode: PlateauMode) -> Result<Self> {
        if !(lr > 0.0 && lr.is_finite()) {
            return Err(TrxError::invalid(format!("learning rate must be positive, got {lr}")));
        }
        let best_metric = match mode {
            PlateauMode::Min => f64::INFINITY,
            PlateauMode::Max => f64::NEG_INFINITY,
        };
        Ok(SchedulerState {
            lr,
            best_metric,
            epochs_since_improve: 0,
        })
    }
}

/// One reduce-on-plateau update after an epoch. A strictly better metric
/// resets the counter; once the counter exceeds `patience` the rate is
/// multiplied by `factor` and the counter restarts.
pub fn plateau_step(state: &SchedulerState, epoch_metric: f64, cfg: &PlateauConfig) -> SchedulerState {
    let improved = match cfg.mode {
        PlateauMode::Min => epoch_metric < state.best_metric,
        PlateauMode::Max => epoch_metric > state.best_metric,
    };
    let mut next = *state;
    if improved {
        next.best_metric = epoch_metric;
        next.epochs_since_improve = 0;
    } else {
        next.epochs_since_improve += 1;
        if next.epochs_since_improve > cfg.patience {
            next.lr *= cfg.factor;
            next.epochs_since_improve = 0;
        }
    }
    next
}

/// `lr_min + (lr_max - lr_min) (1 + cos(pi t / T)) / 2` for `0 <= t <= T`.
pub fn cosine_annealing_lr(t: u32, period: u32, lr_max: f64, lr_min: f64) -> Result<f64> {
    if period == 0 || t > period {
        return Err(TrxError::invalid(format!("step {t} outside [0, {period}]")));
    }
    let phase = std::f64::consts::PI * t as f64 / period as f64;
    Ok(lr_min + 0.5 * (lr_max - lr_min) * (1.0 + phase.cos()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LrSchedule {
    ReduceOnPlateau,
    CosineAnnealing,
}

/// One of the segmentation training recipes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainingScheme {
    pub initial_lr: f64,
    pub schedule: LrSchedule,
    /// Share of each epoch drawn from images with the finding.
    pub positive_fraction: f64,
}

/// The four segmentation recipes. The first recipe's positive share is
/// inferred as 0.9 by analogy with the other three.
pub const SEGMENTATION_SCHEMES: [TrainingScheme; 4] = [
    TrainingScheme {
        initial_lr: 1e-3,
        schedule: LrSchedule::ReduceOnPlateau,
        positive_fraction: 0.9,
    },
    TrainingScheme {
        initial_lr: 1e-5,
        schedule: LrSchedule::CosineAnnealing,
        positive_fraction: 0.6,
    },
    TrainingScheme {
        initial_lr: 1e-5,
        schedule: LrSchedule::CosineAnnealing,
        positive_fraction: 0.4,
    },
    TrainingScheme {
        initial_lr: 1e-3,
        schedule: LrSchedule::ReduceOnPlateau,
        positive_fraction: 0.3,
    },
];
