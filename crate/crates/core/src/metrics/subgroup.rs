use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TrxError};
use crate::fusion::ScoredCase;
use crate::rng;

use super::parallel::map_indexed;
use super::roc::RankedCases;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SubgroupComparison {
    pub auroc_a: f64,
    pub auroc_b: f64,
    /// `|auroc_a - auroc_b|`.
    pub observed_delta: f64,
    pub p_value: f64,
    pub n_perm: usize,
}

/// Permutation test for equal AUROC in two groups.
///
/// Group membership is reshuffled within label strata (positives among
/// positives, negatives among negatives), keeping each group's class counts
/// fixed. Permutation `i` uses ChaCha stream `i` of `seed`. The p-value is
/// `(1 + #{delta_perm >= delta_obs}) / (n_perm + 1)`.
pub fn compare_subgroup_auroc(
    group_a: &[ScoredCase],
    group_b: &[ScoredCase],
    n_perm: usize,
    seed: u64,
) -> Result<SubgroupComparison> {
    compare_subgroup_auroc_with_workers(group_a, group_b, n_perm, seed, None)
}

pub fn compare_subgroup_auroc_with_workers(
    group_a: &[ScoredCase],
    group_b: &[ScoredCase],
    n_perm: usize,
    seed: u64,
    workers: Option<usize>,
) -> Result<SubgroupComparison> {
    for (name, g) in [("A", group_a), ("B", group_b)] {
        let pos = g.iter().filter(|c| c.label).count();
        if pos == 0 || pos == g.len() {
            return Err(TrxError::degenerate(format!(
                "group {name} needs both positive and negative cases"
            )));
        }
    }
    if n_perm == 0 {
        return Err(TrxError::invalid("need at least one permutation"));
    }

    let pooled: Vec<ScoredCase> = group_a.iter().chain(group_b).copied().collect();
    let scores: Vec<f64> = pooled.iter().map(|c| c.score).collect();
    let labels: Vec<bool> = pooled.iter().map(|c| c.label).collect();
    let ranked = RankedCases::new(&scores, &labels)?;

    let delta = |in_a: &[bool]| -> (f64, f64) {
        let a = ranked.weighted_auroc(|i| in_a[i] as u64).expect("both classes in A");
        let b = ranked.weighted_auroc(|i| !in_a[i] as u64).expect("both classes in B");
        (a, b)
    };

    let observed_membership: Vec<bool> = (0..pooled.len()).map(|i| i < group_a.len()).collect();
    let (auroc_a, auroc_b) = delta(&observed_membership);
    let observed = (auroc_a - auroc_b).abs();

    let strata: [Vec<usize>; 2] =
        [true, false].map(|label| (0..pooled.len()).filter(|&i| labels[i] == label).collect());
    let quotas = [true, false].map(|label| group_a.iter().filter(|c| c.label == label).count());

    let exceed = map_indexed(n_perm, workers, |p| {
        let mut rng = rng::substream(seed, p as u64);
        let mut in_a = vec![false; pooled.len()];
        for (stratum, &quota) in strata.iter().zip(&quotas) {
            let mut members = stratum.clone();
            members.shuffle(&mut rng);
            for &i in &members[..quota] {
                in_a[i] = true;
            }
        }
        let (a, b) = delta(&in_a);
        (a - b).abs() >= observed
    })
    .into_iter()
    .filter(|&e| e)
    .count();

    Ok(SubgroupComparison {
        auroc_a,
        auroc_b,
        observed_delta: observed,
        p_value: (1 + exceed) as f64 / (n_perm + 1) as f64,
        n_perm,
    })
}
