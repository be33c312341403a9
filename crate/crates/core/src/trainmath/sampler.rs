use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Result, TrxError};
use crate::rng;

/// One epoch of ids with an exact class quota: `round(epoch_size *
/// pos_fraction)` positives and the rest negatives, each drawn with
/// replacement from its pool, then shuffled together.
pub fn ratio_sampler<T: Clone>(
    pos_ids: &[T],
    neg_ids: &[T],
    pos_fraction: f64,
    epoch_size: usize,
    seed: u64,
) -> Result<Vec<T>> {
    if pos_ids.is_empty() || neg_ids.is_empty() {
        return Err(TrxError::invalid("both sampling pools must be non-empty"));
    }
    if !(pos_fraction > 0.0 && pos_fraction < 1.0) {
        return Err(TrxError::invalid(format!(
            "positive fraction {pos_fraction} outside (0, 1)"
        )));
    }
    let n_pos = (epoch_size as f64 * pos_fraction).round() as usize;
    let mut rng = rng::master(seed);
    let mut epoch: Vec<T> = (0..epoch_size)
        .map(|i| {
            let pool = if i < n_pos { pos_ids } else { neg_ids };
            pool[rng.random_range(0..pool.len())].clone()
        })
        .collect();
    epoch.shuffle(&mut rng);
    Ok(epoch)
}
