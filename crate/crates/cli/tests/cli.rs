use std::path::Path;
use std::process::{Command, Output};

fn trx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trx")).args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn synth(dir: &Path, n: usize, fracture_prevalence: f64, signal: f64) {
    let spec = serde_json::json!({
        "nStudies": n,
        "prevalence": {"pneumothorax": 0.3, "pleural_effusion": 0.3, "lung_opacity": 0.3, "fracture": fracture_prevalence},
        "signalStrength": signal,
        "imageDims": [64, 64],
        "seed": 21,
        "maxStudiesPerPatient": 3
    });
    let spec_path = dir.join("spec.json");
    std::fs::write(&spec_path, spec.to_string()).unwrap();
    let out = trx(&["synth", "--spec", s(&spec_path), "--out", s(dir)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn full_workflow() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    synth(d, 120, 0.3, 0.8);
    let outputs = d.join("outputs");
    let labels = d.join("labels.csv");

    let manifest = d.join("manifest.json");
    assert!(
        trx(&["split", "--labels", s(&labels), "--seed", "4", "--out", s(&manifest)])
            .status
            .success()
    );
    let m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&manifest).unwrap()).unwrap();
    let total = m["trainIds"].as_array().unwrap().len() + m["tuneIds"].as_array().unwrap().len();
    assert_eq!(total, 120);

    let merged = d.join("merged.csv");
    assert!(trx(&["merge-labels", "--labels", s(&labels), "--out", s(&merged)])
        .status
        .success());
    assert_eq!(std::fs::read_to_string(&merged).unwrap().lines().count(), 121);

    let th = d.join("th.json");
    let out = trx(&[
        "calibrate",
        "--outputs",
        s(&outputs),
        "--labels",
        s(&labels),
        "--finding",
        "fracture",
        "--out",
        s(&th),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let cfg: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&th).unwrap()).unwrap();
    assert_eq!(cfg["cutpoints"]["pneumothorax"], 144.43);
    assert_ne!(cfg["cutpoints"]["fracture"], 0.15);

    let results = d.join("results.csv");
    assert!(trx(&[
        "triage",
        "--outputs",
        s(&outputs),
        "--thresholds",
        s(&th),
        "--out",
        s(&results)
    ])
    .status
    .success());
    let text = std::fs::read_to_string(&results).unwrap();
    assert!(text.starts_with("studyId,pneumothoraxScore,"));
    assert_eq!(text.lines().count(), 121);

    let png_path = d.join("h.png");
    assert!(trx(&[
        "render",
        "--outputs",
        s(&outputs),
        "--study",
        "S000004",
        "--out",
        s(&png_path)
    ])
    .status
    .success());
    let decoder = png::Decoder::new(std::io::BufReader::new(std::fs::File::open(&png_path).unwrap()));
    let reader = decoder.read_info().unwrap();
    let info = reader.info();
    assert_eq!(
        (info.width, info.height, info.color_type),
        (64, 64, png::ColorType::Rgba)
    );

    let report = d.join("report.json");
    let out = trx(&[
        "evaluate",
        "--outputs",
        s(&outputs),
        "--labels",
        s(&labels),
        "--thresholds",
        s(&th),
        "--seed",
        "1",
        "--subgroup",
        "ageband",
        "--age-bands",
        "30,60",
        "--n-resamples",
        "300",
        "--n-perm",
        "100",
        "--out",
        s(&report),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["tasks"].as_array().unwrap().len(), 5);
    assert_eq!(r["subgroup"]["groups"], serde_json::json!(["<30", "30-59", ">=60"]));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    synth(d, 40, 0.0, 1.0);
    let outputs = d.join("outputs");
    let labels = d.join("labels.csv");
    let th = d.join("th.json");

    // No fracture positives: the tuning set is single-class.
    let out = trx(&[
        "calibrate",
        "--outputs",
        s(&outputs),
        "--labels",
        s(&labels),
        "--finding",
        "fracture",
        "--out",
        s(&th),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("degenerate tuning set"));

    let out = trx(&["triage", "--outputs", s(&d.join("missing")), "--out", s(&th)]);
    assert_eq!(out.status.code(), Some(1));

    std::fs::write(outputs.join("S000003/pneumothorax.trxm"), b"TRXM\x01\x00\x00\x00").unwrap();
    let out = trx(&["triage", "--outputs", s(&outputs), "--out", s(&th)]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("S000003") && err.contains("pneumothorax.trxm"), "{err}");

    let out = trx(&[
        "split",
        "--labels",
        s(&labels),
        "--seed",
        "1",
        "--tune-fraction",
        "1.5",
        "--out",
        s(&th),
    ]);
    assert_eq!(out.status.code(), Some(1));
}
