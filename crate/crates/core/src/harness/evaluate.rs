//! Cohort evaluation: five binary tasks (abnormality plus one per finding)
//! with bootstrap intervals and an optional subgroup comparison.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::domain::{FindingKind, StudyOutputs, ThresholdConfig, TriageResult};
use crate::error::{Result, TrxError};
use crate::fusion::{run_pipeline, ScoredCase};
use crate::labelset::{LabelRecord, Sex};
use crate::metrics::{
    bootstrap_resamples, compare_subgroup_auroc_with_workers, diagnostic_metrics, percentile_interval, BootstrapConfig,
    ConfidenceInterval, ConfusionCounts, RankedCases, RocCurve, SubgroupComparison, DEFAULT_LEVEL, DEFAULT_RESAMPLES,
};

pub const DEFAULT_PERMUTATIONS: usize = 2000;
pub const DEFAULT_AGE_EDGES: [u32; 2] = [40, 65];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Subgrouping {
    Sex,
    /// Half-open bands split at the given ascending ages.
    AgeBand(Vec<u32>),
}

impl Subgrouping {
    pub fn name(&self) -> &'static str {
        match self {
            Subgrouping::Sex => "sex",
            Subgrouping::AgeBand(_) => "ageband",
        }
    }

    /// Ordered group names.
    pub fn groups(&self) -> Vec<String> {
        match self {
            Subgrouping::Sex => [Sex::Female, Sex::Male, Sex::Other]
                .iter()
                .map(|s| s.as_str().to_string())
                .collect(),
            Subgrouping::AgeBand(edges) => {
                let mut names = Vec::with_capacity(edges.len() + 1);
                names.push(format!("<{}", edges[0]));
                for w in edges.windows(2) {
                    names.push(format!("{}-{}", w[0], w[1] - 1));
                }
                names.push(format!(">={}", edges[edges.len() - 1]));
                names
            }
        }
    }

    pub fn group_of(&self, record: &LabelRecord) -> usize {
        match self {
            Subgrouping::Sex => match record.sex {
                Sex::Female => 0,
                Sex::Male => 1,
                Sex::Other => 2,
            },
            Subgrouping::AgeBand(edges) => edges.iter().take_while(|&&e| record.age >= e).count(),
        }
    }

    fn validate(&self) -> Result<()> {
        if let Subgrouping::AgeBand(edges) = self {
            if edges.is_empty() || edges.windows(2).any(|w| w[0] >= w[1]) {
                return Err(TrxError::invalid(
                    "age band edges must be non-empty and strictly ascending",
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalOptions {
    pub seed: u64,
    pub n_resamples: usize,
    pub level: f64,
    pub workers: Option<usize>,
    pub subgroup: Option<Subgrouping>,
    pub n_permutations: usize,
}

impl EvalOptions {
    pub fn new(seed: u64) -> Self {
        EvalOptions {
            seed,
            n_resamples: DEFAULT_RESAMPLES,
            level: DEFAULT_LEVEL,
            workers: None,
            subgroup: None,
            n_permutations: DEFAULT_PERMUTATIONS,
        }
    }

    fn bootstrap(&self) -> BootstrapConfig {
        BootstrapConfig {
            n_resamples: self.n_resamples,
            level: self.level,
            seed: self.seed,
            workers: self.workers,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Estimate {
    pub value: f64,
    /// Absent when the statistic is undefined on most resamples.
    pub ci: Option<ConfidenceInterval>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TaskReport {
    pub task: String,
    pub available: bool,
    pub positives: usize,
    pub negatives: usize,
    pub auroc: Option<Estimate>,
    pub sensitivity: Option<Estimate>,
    pub specificity: Option<Estimate>,
    pub ppv: Option<Estimate>,
    pub npv: Option<Estimate>,
    pub counts: Option<ConfusionCounts>,
    pub roc: Option<RocCurve>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GroupComparison {
    pub group_a: String,
    pub group_b: String,
    #[serde(flatten)]
    pub result: SubgroupComparison,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SubgroupTask {
    pub task: String,
    /// AUROC per group, `None` where the group lacks a class.
    pub group_auroc: Vec<Option<f64>>,
    pub comparisons: Vec<GroupComparison>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SubgroupReport {
    pub variable: String,
    pub groups: Vec<String>,
    pub group_sizes: Vec<usize>,
    pub tasks: Vec<SubgroupTask>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EvalReport {
    pub seed: u64,
    pub n_studies: usize,
    pub n_resamples: usize,
    pub level: f64,
    pub tasks: Vec<TaskReport>,
    pub subgroup: Option<SubgroupReport>,
}

impl EvalReport {
    pub fn task(&self, name: &str) -> Option<&TaskReport> {
        self.tasks.iter().find(|t| t.task == name)
    }
}

pub const ABNORMALITY_TASK: &str = "abnormality";

/// Continuous abnormality score: the largest cutpoint-relative excess over
/// the four findings. It is positive exactly when some flag is raised, so
/// thresholding it at 0 reproduces the OR verdict.
pub fn abnormality_score(result: &TriageResult, cfg: &ThresholdConfig) -> f64 {
    FindingKind::ALL
        .iter()
        .map(|&k| {
            let cut = cfg.cutpoint(k);
            let excess = result.scores[k] - cut;
            if cut != 0.0 {
                excess / cut.abs()
            } else {
                excess
            }
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Per-task inputs aligned with the study order.
struct TaskData {
    name: String,
    scores: Vec<f64>,
    preds: Vec<bool>,
    labels: Vec<bool>,
}

impl TaskData {
    fn positives(&self) -> usize {
        self.labels.iter().filter(|&&l| l).count()
    }

    fn cases<'a>(&'a self, members: &'a [usize]) -> impl Iterator<Item = ScoredCase> + 'a {
        members.iter().map(|&i| ScoredCase::new(self.scores[i], self.labels[i]))
    }
}

fn collect_tasks(results: &[TriageResult], labels: &[&LabelRecord], cfg: &ThresholdConfig) -> Vec<TaskData> {
    let finding_truth = |r: &LabelRecord, k: FindingKind| r.state(k.label_column()).is_positive();
    let mut tasks = vec![TaskData {
        name: ABNORMALITY_TASK.to_string(),
        scores: results.iter().map(|r| abnormality_score(r, cfg)).collect(),
        preds: results.iter().map(|r| r.abnormal).collect(),
        labels: labels
            .iter()
            .map(|l| FindingKind::ALL.iter().any(|&k| finding_truth(l, k)))
            .collect(),
    }];
    for k in FindingKind::ALL {
        tasks.push(TaskData {
            name: k.key().to_string(),
            scores: results.iter().map(|r| r.scores[k]).collect(),
            preds: results.iter().map(|r| r.flags[k]).collect(),
            labels: labels.iter().map(|l| finding_truth(l, k)).collect(),
        });
    }
    tasks
}

const N_STATS: usize = 5;

/// AUROC then sensitivity, specificity, PPV, NPV, with case `i` counted
/// `weight[i]` times.
fn weighted_stats(task: &TaskData, ranked: &RankedCases, weight: &[u64]) -> [Option<f64>; N_STATS] {
    let mut counts = ConfusionCounts::default();
    for ((&p, &l), &w) in task.preds.iter().zip(&task.labels).zip(weight) {
        counts.record(p, l, w);
    }
    let m = diagnostic_metrics(&counts).as_array();
    [ranked.weighted_auroc(|i| weight[i]), m[0], m[1], m[2], m[3]]
}

/// Runs the pipeline on every study and evaluates the five tasks.
///
/// Studies are processed in study-id order, so the report does not depend
/// on input order. Every task shares the same bootstrap resamples.
pub fn evaluate_cohort(
    outputs: &[StudyOutputs],
    labels: &[LabelRecord],
    cfg: &ThresholdConfig,
    opts: &EvalOptions,
) -> Result<EvalReport> {
    if outputs.is_empty() {
        return Err(TrxError::invalid("no studies to evaluate"));
    }
    if let Some(s) = &opts.subgroup {
        s.validate()?;
    }
    let by_id: BTreeMap<&str, &LabelRecord> = labels.iter().map(|l| (l.study_id.as_str(), l)).collect();
    let mut studies: Vec<&StudyOutputs> = outputs.iter().collect();
    studies.sort_by(|a, b| a.study_id().cmp(b.study_id()));
    if let Some(w) = studies.windows(2).find(|w| w[0].study_id() == w[1].study_id()) {
        return Err(TrxError::invalid(format!("duplicate study {}", w[0].study_id())));
    }
    let records: Vec<&LabelRecord> = studies
        .iter()
        .map(|s| {
            by_id
                .get(s.study_id())
                .copied()
                .ok_or_else(|| TrxError::invalid(format!("no label for study {}", s.study_id())))
        })
        .collect::<Result<_>>()?;
    let results: Vec<TriageResult> = studies.iter().map(|s| run_pipeline(s, cfg)).collect();
    let tasks = collect_tasks(&results, &records, cfg);
    let n = studies.len();

    let ranked: Vec<Option<RankedCases>> = tasks
        .iter()
        .map(|t| {
            let p = t.positives();
            if p == 0 || p == n {
                Ok(None)
            } else {
                RankedCases::new(&t.scores, &t.labels).map(Some)
            }
        })
        .collect::<Result<_>>()?;

    let boot_cfg = opts.bootstrap();
    let resampled: Vec<Vec<[Option<f64>; N_STATS]>> = bootstrap_resamples(n, &boot_cfg, |idx| {
        let mut weight = vec![0u64; n];
        for &i in idx {
            weight[i] += 1;
        }
        tasks
            .iter()
            .zip(&ranked)
            .map(|(t, r)| match r {
                Some(r) => weighted_stats(t, r, &weight),
                None => [None; N_STATS],
            })
            .collect()
    })?;

    let unit = vec![1u64; n];
    let mut reports = Vec::with_capacity(tasks.len());
    for (ti, (task, ranked)) in tasks.iter().zip(&ranked).enumerate() {
        let positives = task.positives();
        let mut report = TaskReport {
            task: task.name.clone(),
            available: ranked.is_some(),
            positives,
            negatives: n - positives,
            auroc: None,
            sensitivity: None,
            specificity: None,
            ppv: None,
            npv: None,
            counts: None,
            roc: None,
        };
        if let Some(ranked) = ranked {
            let point = weighted_stats(task, ranked, &unit);
            let estimates: Vec<Option<Estimate>> = (0..N_STATS)
                .map(|s| {
                    point[s].map(|value| {
                        let column: Vec<Option<f64>> = resampled.iter().map(|r| r[ti][s]).collect();
                        Estimate {
                            value,
                            ci: percentile_interval(&column, &boot_cfg).ok(),
                        }
                    })
                })
                .collect();
            let [auroc, sens, spec, ppv, npv]: [Option<Estimate>; N_STATS] =
                estimates.try_into().expect("five statistics");
            report.auroc = auroc;
            report.sensitivity = sens;
            report.specificity = spec;
            report.ppv = ppv;
            report.npv = npv;
            let mut counts = ConfusionCounts::default();
            for (&p, &l) in task.preds.iter().zip(&task.labels) {
                counts.record(p, l, 1);
            }
            report.counts = Some(counts);
            report.roc = ranked.roc_curve();
        }
        reports.push(report);
    }

    let subgroup = match &opts.subgroup {
        Some(grouping) => Some(subgroup_report(grouping, &tasks, &records, opts)?),
        None => None,
    };

    Ok(EvalReport {
        seed: opts.seed,
        n_studies: n,
        n_resamples: opts.n_resamples,
        level: opts.level,
        tasks: reports,
        subgroup,
    })
}

fn subgroup_report(
    grouping: &Subgrouping,
    tasks: &[TaskData],
    records: &[&LabelRecord],
    opts: &EvalOptions,
) -> Result<SubgroupReport> {
    let groups = grouping.groups();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); groups.len()];
    for (i, r) in records.iter().enumerate() {
        members[grouping.group_of(r)].push(i);
    }
    let mut out_tasks = Vec::with_capacity(tasks.len());
    for task in tasks {
        let group_cases: Vec<Vec<ScoredCase>> = members.iter().map(|m| task.cases(m).collect()).collect();
        let group_auroc = group_cases
            .iter()
            .map(|cases| {
                let scores: Vec<f64> = cases.iter().map(|c| c.score).collect();
                let labels: Vec<bool> = cases.iter().map(|c| c.label).collect();
                RankedCases::new(&scores, &labels).ok().and_then(|r| r.auroc())
            })
            .collect::<Vec<_>>();
        let mut comparisons = Vec::new();
        for a in 0..groups.len() {
            for b in a + 1..groups.len() {
                if group_auroc[a].is_none() || group_auroc[b].is_none() {
                    continue;
                }
                let result = compare_subgroup_auroc_with_workers(
                    &group_cases[a],
                    &group_cases[b],
                    opts.n_permutations,
                    opts.seed,
                    opts.workers,
                )?;
                comparisons.push(GroupComparison {
                    group_a: groups[a].clone(),
                    group_b: groups[b].clone(),
                    result,
                });
            }
        }
        out_tasks.push(SubgroupTask {
            task: task.name.clone(),
            group_auroc,
            comparisons,
        });
    }
    Ok(SubgroupReport {
        variable: grouping.name().to_string(),
        groups,
        group_sizes: members.iter().map(Vec::len).collect(),
        tasks: out_tasks,
    })
}
