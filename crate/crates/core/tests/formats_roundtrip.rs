use proptest::prelude::*;
use trx_core::harness::evaluate::{evaluate_cohort, EvalOptions, EvalReport, Subgrouping};
use trx_core::harness::formats::{load_cam, load_raw_outputs, read_json, write_json, CAM_FILE};
use trx_core::harness::labels_csv::read_labels;
use trx_core::harness::synth::{synth_cohort, CohortSpec};
use trx_core::labelset::{patient_level_split, SplitManifest};
use trx_core::{default_paper_thresholds, FindingKind, ThresholdConfig, TrxError};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn cohort_files_round_trip(
        n in 1usize..25,
        prev in 0.0f64..=1.0,
        s in 0.0f64..=1.0,
        seed in any::<u64>(),
        per_patient in 1usize..4,
    ) {
        let spec = CohortSpec { max_studies_per_patient: per_patient, ..CohortSpec::new(n, prev, s, seed) };
        let cohort = synth_cohort(&spec).unwrap();
        let dir = tempfile::tempdir().unwrap();
        cohort.write(dir.path()).unwrap();
        let outputs = load_raw_outputs(&dir.path().join("outputs")).unwrap();
        prop_assert_eq!(&outputs, &cohort.outputs);
        prop_assert_eq!(read_labels(&dir.path().join("labels.csv")).unwrap(), cohort.labels.clone());
        for (o, cam) in cohort.outputs.iter().zip(&cohort.cams) {
            prop_assert_eq!(load_cam(&dir.path().join("outputs"), o.study_id()).unwrap(), Some(cam.clone()));
        }
    }
}

#[test]
fn same_seed_same_bytes() {
    let spec = CohortSpec::new(10, 0.4, 0.7, 99);
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    synth_cohort(&spec).unwrap().write(a.path()).unwrap();
    synth_cohort(&spec).unwrap().write(b.path()).unwrap();
    let read = |d: &std::path::Path, f: &str| std::fs::read(d.join(f)).unwrap();
    assert_eq!(read(a.path(), "labels.csv"), read(b.path(), "labels.csv"));
    for study in ["S000000", "S000009"] {
        for f in [
            "pneumothorax.trxm",
            "pleural_effusion.trxm",
            "lung_opacity.txt",
            "fracture.txt",
            CAM_FILE,
        ] {
            let rel = format!("outputs/{study}/{f}");
            assert_eq!(read(a.path(), &rel), read(b.path(), &rel), "{rel}");
        }
    }
}

#[test]
fn json_documents_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = default_paper_thresholds()
        .with_cutpoint(FindingKind::Fracture, 0.3125)
        .unwrap();
    let p = dir.path().join("t.json");
    write_json(&p, &cfg).unwrap();
    assert_eq!(read_json::<ThresholdConfig>(&p).unwrap(), cfg);
    let text = std::fs::read_to_string(&p).unwrap();
    let keys: Vec<usize> = ["pneumothorax", "pleural_effusion", "lung_opacity", "fracture"]
        .iter()
        .map(|k| text.find(k).unwrap())
        .collect();
    assert!(keys.windows(2).all(|w| w[0] < w[1]));

    let spec = CohortSpec {
        max_studies_per_patient: 3,
        ..CohortSpec::new(40, 0.3, 0.6, 5)
    };
    let cohort = synth_cohort(&spec).unwrap();
    let m = patient_level_split(&cohort.labels, |r| r.state("Edema").is_positive(), 0.2, 8).unwrap();
    write_json(&p, &m).unwrap();
    assert_eq!(read_json::<SplitManifest>(&p).unwrap(), m);

    let opts = EvalOptions {
        n_resamples: 200,
        n_permutations: 50,
        subgroup: Some(Subgrouping::AgeBand(vec![40, 65])),
        ..EvalOptions::new(3)
    };
    let report = evaluate_cohort(&cohort.outputs, &cohort.labels, &spec.thresholds(), &opts).unwrap();
    write_json(&p, &report).unwrap();
    assert_eq!(read_json::<EvalReport>(&p).unwrap(), report);
}

#[test]
fn broken_study_names_file() {
    let dir = tempfile::tempdir().unwrap();
    let cohort = synth_cohort(&CohortSpec::new(3, 0.5, 1.0, 1)).unwrap();
    cohort.write(dir.path()).unwrap();
    let outputs = dir.path().join("outputs");

    let softmax = outputs.join("S000001/lung_opacity.txt");
    std::fs::write(&softmax, "0.7\n0.7\n").unwrap();
    match load_raw_outputs(&outputs).unwrap_err() {
        TrxError::Format { study, file, .. } => {
            assert_eq!((study.as_str(), file.as_str()), ("S000001", "lung_opacity.txt"));
        }
        e => panic!("unexpected {e}"),
    }
    std::fs::write(&softmax, "0.3\n0.7\n").unwrap();

    std::fs::remove_file(outputs.join("S000002/fracture.txt")).unwrap();
    let msg = load_raw_outputs(&outputs).unwrap_err().to_string();
    assert!(msg.contains("S000002") && msg.contains("fracture.txt"), "{msg}");
}
