use trx_core::fusion::run_pipeline;
use trx_core::harness::evaluate::{evaluate_cohort, EvalOptions, Subgrouping};
use trx_core::harness::synth::{synth_cohort, CohortSpec};
use trx_core::metrics::{bootstrap_ci, BootstrapConfig};
use trx_core::FindingKind;

#[test]
fn report_counts_agree_with_pipeline() {
    let spec = CohortSpec::new(150, 0.25, 0.6, 31);
    let cohort = synth_cohort(&spec).unwrap();
    let cfg = spec.thresholds();
    let opts = EvalOptions {
        n_resamples: 100,
        ..EvalOptions::new(1)
    };
    let report = evaluate_cohort(&cohort.outputs, &cohort.labels, &cfg, &opts).unwrap();
    let results: Vec<_> = cohort.outputs.iter().map(|o| run_pipeline(o, &cfg)).collect();
    for k in FindingKind::ALL {
        let counts = report.task(k.key()).unwrap().counts.unwrap();
        let flagged = results.iter().filter(|r| r.flags[k]).count() as u64;
        assert_eq!(counts.tp + counts.fp, flagged, "{k}");
    }
    let counts = report.task("abnormality").unwrap().counts.unwrap();
    assert_eq!(
        counts.tp + counts.fp,
        results.iter().filter(|r| r.abnormal).count() as u64
    );
    for t in &report.tasks {
        for est in [&t.auroc, &t.sensitivity, &t.specificity, &t.ppv, &t.npv]
            .into_iter()
            .flatten()
        {
            if let Some(ci) = est.ci {
                assert!(ci.low <= ci.high);
            }
        }
    }
}

#[test]
fn worker_count_does_not_change_report() {
    let spec = CohortSpec::new(120, 0.3, 0.5, 12);
    let cohort = synth_cohort(&spec).unwrap();
    let run = |workers| {
        let opts = EvalOptions {
            n_resamples: 500,
            n_permutations: 200,
            workers: Some(workers),
            subgroup: Some(Subgrouping::Sex),
            ..EvalOptions::new(77)
        };
        let r = evaluate_cohort(&cohort.outputs, &cohort.labels, &spec.thresholds(), &opts).unwrap();
        serde_json::to_string(&r).unwrap()
    };
    let one = run(1);
    assert_eq!(one, run(3));
    assert_eq!(one, run(8));
}

#[test]
fn zero_variance_statistic_has_zero_width() {
    let ci = bootstrap_ci(
        |_| Some(0.42),
        50,
        &BootstrapConfig {
            n_resamples: 300,
            ..BootstrapConfig::new(4)
        },
    )
    .unwrap();
    assert_eq!((ci.low, ci.high), (0.42, 0.42));
}
