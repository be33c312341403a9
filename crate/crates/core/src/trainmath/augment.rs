use rand::Rng;

use crate::error::{Result, TrxError};
use crate::rng;

/// Parameter ranges of the training augmentation pipeline. Only the
/// intensity transforms are implemented; the affine ranges are recorded for
/// configuration purposes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AugmentationRanges {
    pub contrast: (f64, f64),
    pub brightness: (f64, f64),
    /// Gamma in percent: 100 is the identity.
    pub gamma_percent: (f64, f64),
    pub shift_limit: f64,
    pub scale_limit: f64,
    pub rotate_limit_deg: f64,
}

impl AugmentationRanges {
    pub const DEFAULT: AugmentationRanges = AugmentationRanges {
        contrast: (-0.2, 0.2),
        brightness: (-0.2, 0.2),
        gamma_percent: (80.0, 120.0),
        shift_limit: 0.0625,
        scale_limit: 0.1,
        rotate_limit_deg: 45.0,
    };
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntensityParams {
    pub contrast: f64,
    pub brightness: f64,
    pub gamma_percent: f64,
}

impl IntensityParams {
    pub const NEUTRAL: IntensityParams = IntensityParams {
        contrast: 0.0,
        brightness: 0.0,
        gamma_percent: 100.0,
    };

    pub fn new(contrast: f64, brightness: f64, gamma_percent: f64) -> Result<Self> {
        let r = AugmentationRanges::DEFAULT;
        let within = |v: f64, (lo, hi): (f64, f64)| v >= lo && v <= hi;
        if !within(contrast, r.contrast) || !within(brightness, r.brightness) || !within(gamma_percent, r.gamma_percent)
        {
            return Err(TrxError::invalid(format!(
                "intensity parameters out of range: contrast {contrast}, brightness {brightness}, gamma {gamma_percent}"
            )));
        }
        Ok(IntensityParams {
            contrast,
            brightness,
            gamma_percent,
        })
    }

    /// Each parameter uniform over its range.
    pub fn sample(seed: u64) -> Self {
        let r = AugmentationRanges::DEFAULT;
        let mut rng = rng::master(seed);
        IntensityParams {
            contrast: rng.random_range(r.contrast.0..=r.contrast.1),
            brightness: rng.random_range(r.brightness.0..=r.brightness.1),
            gamma_percent: rng.random_range(r.gamma_percent.0..=r.gamma_percent.1),
        }
    }
}

/// Contrast about mid-gray, then brightness shift, then gamma; clamped to
/// `[0, 1]` after each step.
pub fn augment_intensity(grid: &[f64], params: &IntensityParams) -> Result<Vec<f64>> {
    if let Some(v) = grid.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(TrxError::invalid(format!("pixel {v} outside [0, 1]")));
    }
    let IntensityParams {
        contrast,
        brightness,
        gamma_percent,
    } = IntensityParams::new(params.contrast, params.brightness, params.gamma_percent)?;
    let exponent = gamma_percent / 100.0;
    Ok(grid
        .iter()
        .map(|&x| {
            let x = ((x - 0.5) * (1.0 + contrast) + 0.5).clamp(0.0, 1.0);
            let x = (x + brightness).clamp(0.0, 1.0);
            x.powf(exponent)
        })
        .collect())
}
