//! Diagnostic statistics: confusion metrics, ROC/AUROC, DICE, percentile
//! bootstrap intervals and the subgroup AUROC permutation test.

mod bootstrap;
mod confusion;
mod parallel;
mod roc;
mod subgroup;

pub use bootstrap::{
    bootstrap_ci, bootstrap_resamples, percentile_interval, quantile, BootstrapConfig, ConfidenceInterval,
    DEFAULT_LEVEL, DEFAULT_RESAMPLES,
};
pub use confusion::{confusion_counts, diagnostic_metrics, dice_score, ConfusionCounts, DiagnosticMetrics};
pub use parallel::map_indexed;
pub use roc::{auroc, roc_curve, RankedCases, RocCurve, RocPoint};
pub use subgroup::{compare_subgroup_auroc, compare_subgroup_auroc_with_workers, SubgroupComparison};
