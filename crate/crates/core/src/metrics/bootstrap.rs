use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TrxError};
use crate::rng;

use super::parallel::map_indexed;

pub const DEFAULT_RESAMPLES: usize = 10_000;
pub const DEFAULT_LEVEL: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BootstrapConfig {
    pub n_resamples: usize,
    pub level: f64,
    pub seed: u64,
    /// Thread count; `None` uses the global pool. Never affects results.
    pub workers: Option<usize>,
}

impl BootstrapConfig {
    pub fn new(seed: u64) -> Self {
        BootstrapConfig {
            n_resamples: DEFAULT_RESAMPLES,
            level: DEFAULT_LEVEL,
            seed,
            workers: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_resamples == 0 {
            return Err(TrxError::invalid("need at least one resample"));
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(TrxError::invalid(format!("level {} outside (0, 1)", self.level)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ConfidenceInterval {
    pub low: f64,
    pub high: f64,
    pub level: f64,
    pub n_resamples: usize,
    pub seed: u64,
    /// Resamples on which the statistic was undefined.
    pub discarded: usize,
}

/// Evaluates `stat` on `cfg.n_resamples` bootstrap resamples of `0..n`.
///
/// Resample `b` draws its `n` indices (with replacement) from the ChaCha
/// stream `b` of `cfg.seed`, so the output is independent of scheduling.
pub fn bootstrap_resamples<T, F>(n: usize, cfg: &BootstrapConfig, stat: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&[usize]) -> T + Sync + Send,
{
    cfg.validate()?;
    if n == 0 {
        return Err(TrxError::invalid("cannot resample an empty sample"));
    }
    Ok(map_indexed(cfg.n_resamples, cfg.workers, |b| {
        let mut rng = rng::substream(cfg.seed, b as u64);
        let indices: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
        stat(&indices)
    }))
}

/// Percentile interval from resampled statistics. `None` entries are
/// discarded; more than half discarded is an error.
pub fn percentile_interval(values: &[Option<f64>], cfg: &BootstrapConfig) -> Result<ConfidenceInterval> {
    let mut kept: Vec<f64> = values.iter().flatten().copied().collect();
    let discarded = values.len() - kept.len();
    if kept.is_empty() || discarded * 2 > values.len() {
        return Err(TrxError::degenerate(format!(
            "statistic undefined on {discarded} of {} resamples",
            values.len()
        )));
    }
    kept.sort_by(f64::total_cmp);
    let alpha = 1.0 - cfg.level;
    Ok(ConfidenceInterval {
        low: quantile(&kept, alpha / 2.0),
        high: quantile(&kept, 1.0 - alpha / 2.0),
        level: cfg.level,
        n_resamples: values.len(),
        seed: cfg.seed,
        discarded,
    })
}

/// Linearly interpolated quantile of ascending `sorted` data.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let (a, b) = (sorted[lo], sorted[hi]);
    if a == b {
        a
    } else {
        a + (h - lo as f64) * (b - a)
    }
}

/// Percentile bootstrap CI of a statistic over sample indices. The
/// statistic returns `None` where it is undefined on a resample.
pub fn bootstrap_ci<F>(stat: F, n: usize, cfg: &BootstrapConfig) -> Result<ConfidenceInterval>
where
    F: Fn(&[usize]) -> Option<f64> + Sync + Send,
{
    let values = bootstrap_resamples(n, cfg, stat)?;
    percentile_interval(&values, cfg)
}
