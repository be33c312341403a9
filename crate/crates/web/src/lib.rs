//! Browser bindings for the `trx` demo page.
//!
//! Every entry point works on a synthetic cohort generated from a seed, so
//! the page needs no data files. The exported functions are thin wrappers
//! over plain Rust functions that the native tests exercise directly.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use trx_core::compositor::{render_study_layers, unify_heatmaps, ColorScale};
use trx_core::fusion::{calibrate_threshold, run_pipeline, ScoredCase};
use trx_core::harness::synth::{synth_cohort, CohortSpec, SynthCohort};
use trx_core::metrics::{confusion_counts, diagnostic_metrics, RankedCases, RocPoint};
use trx_core::{FindingKind, FindingMap, ThresholdConfig, TriageResult, TrxError};

const DEMO_SIDE: usize = 128;

fn demo_cohort(seed: u32, n: usize, signal: f64) -> trx_core::Result<SynthCohort> {
    let spec = CohortSpec {
        image_dims: (DEMO_SIDE, DEMO_SIDE),
        ..CohortSpec::new(n, 0.35, signal, u64::from(seed))
    };
    synth_cohort(&spec)
}

fn to_js(e: TrxError) -> JsError {
    JsError::new(&e.to_string())
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("plain data serializes")
}

/// RGBA pixels of one study's unified heatmap.
#[wasm_bindgen]
pub struct Heatmap {
    width: usize,
    height: usize,
    rgba: Vec<u8>,
    triage: TriageResult,
}

#[wasm_bindgen]
impl Heatmap {
    #[wasm_bindgen(getter)]
    pub fn width(&self) -> usize {
        self.width
    }

    #[wasm_bindgen(getter)]
    pub fn height(&self) -> usize {
        self.height
    }

    /// Row-major RGBA8, ready for `ImageData`.
    pub fn rgba(&self) -> Vec<u8> {
        self.rgba.clone()
    }

    /// The study's triage result as JSON.
    #[wasm_bindgen(js_name = triageJson)]
    pub fn triage_json(&self) -> String {
        json(&self.triage)
    }
}

pub fn heatmap_for(seed: u32, signal: f64, activation_floor: f64) -> trx_core::Result<Heatmap> {
    let cohort = demo_cohort(seed, 1, signal)?;
    let (outputs, cam) = (&cohort.outputs[0], &cohort.cams[0]);
    let layers = render_study_layers(outputs, Some(cam), &ColorScale::new(activation_floor)?)?;
    let unified = unify_heatmaps(&layers)?;
    Ok(Heatmap {
        width: unified.width(),
        height: unified.height(),
        rgba: unified.to_rgba_bytes(),
        triage: run_pipeline(outputs, &ThresholdConfig::default()),
    })
}

/// Synthesizes one study and renders its fused heat layers.
#[wasm_bindgen(js_name = renderStudy)]
pub fn render_study(seed: u32, signal: f64, activation_floor: f64) -> Result<Heatmap, JsError> {
    heatmap_for(seed, signal, activation_floor).map_err(to_js)
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TaskSummary {
    pub task: String,
    pub flagged: usize,
    pub positives: usize,
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TriageSummary {
    pub n_studies: usize,
    pub tasks: Vec<TaskSummary>,
    /// First studies of the cohort, for display.
    pub studies: Vec<TriageResult>,
}

fn summarize(task: &str, preds: &[bool], labels: &[bool]) -> TaskSummary {
    let m = diagnostic_metrics(&confusion_counts(preds, labels).expect("aligned slices"));
    TaskSummary {
        task: task.to_string(),
        flagged: preds.iter().filter(|&&p| p).count(),
        positives: labels.iter().filter(|&&l| l).count(),
        sensitivity: m.sensitivity,
        specificity: m.specificity,
    }
}

pub fn triage_summary(seed: u32, n: usize, signal: f64, cutpoints: FindingMap<f64>) -> trx_core::Result<TriageSummary> {
    let cfg = ThresholdConfig::new(cutpoints)?;
    let cohort = demo_cohort(seed, n, signal)?;
    let results: Vec<TriageResult> = cohort.outputs.iter().map(|o| run_pipeline(o, &cfg)).collect();
    let truth: Vec<FindingMap<bool>> = cohort
        .labels
        .iter()
        .map(|l| FindingMap::from_fn(|k| l.state(k.label_column()).is_positive()))
        .collect();
    let mut tasks = vec![summarize(
        "abnormality",
        &results.iter().map(|r| r.abnormal).collect::<Vec<_>>(),
        &truth.iter().map(|t| t.values().any(|&v| v)).collect::<Vec<_>>(),
    )];
    for k in FindingKind::ALL {
        tasks.push(summarize(
            k.key(),
            &results.iter().map(|r| r.flags[k]).collect::<Vec<_>>(),
            &truth.iter().map(|t| t[k]).collect::<Vec<_>>(),
        ));
    }
    Ok(TriageSummary {
        n_studies: results.len(),
        tasks,
        studies: results.into_iter().take(12).collect(),
    })
}

/// Runs the OR pipeline over a synthetic cohort with the given cutpoints
/// (pneumothorax, pleural effusion, lung opacity, fracture) and returns a
/// JSON summary.
#[wasm_bindgen(js_name = triageCohort)]
pub fn triage_cohort(seed: u32, n: usize, signal: f64, cutpoints: Vec<f64>) -> Result<String, JsError> {
    if cutpoints.len() != 4 {
        return Err(JsError::new("expected four cutpoints"));
    }
    let cuts = FindingMap::from_fn(|k| cutpoints[k.index()]);
    triage_summary(seed, n, signal, cuts).map(|s| json(&s)).map_err(to_js)
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RocSummary {
    pub finding: FindingKind,
    pub auroc: f64,
    pub points: Vec<RocPoint>,
    pub calibrated_cutpoint: f64,
    pub sensitivity: f64,
    pub specificity: f64,
    pub youden_j: f64,
    /// Operating point of the default cutpoint.
    pub default_cutpoint: f64,
    pub default_point: RocPoint,
}

pub fn roc_summary(seed: u32, n: usize, signal: f64, finding: FindingKind) -> trx_core::Result<RocSummary> {
    let cohort = demo_cohort(seed, n, signal)?;
    let scores: Vec<f64> = cohort
        .outputs
        .iter()
        .map(|o| trx_core::fusion::score_of(o.get(finding)))
        .collect();
    let labels: Vec<bool> = cohort
        .labels
        .iter()
        .map(|l| l.state(finding.label_column()).is_positive())
        .collect();
    let ranked = RankedCases::new(&scores, &labels)?;
    let curve = ranked
        .roc_curve()
        .ok_or_else(|| TrxError::Degenerate(format!("{finding} has a single class in this cohort")))?;
    let cases: Vec<ScoredCase> = scores
        .iter()
        .zip(&labels)
        .map(|(&s, &l)| ScoredCase::new(s, l))
        .collect();
    let cal = calibrate_threshold(&cases)?;
    let default_cutpoint = ThresholdConfig::default().cutpoint(finding);
    let preds: Vec<bool> = scores.iter().map(|&s| s > default_cutpoint).collect();
    let m = diagnostic_metrics(&confusion_counts(&preds, &labels)?);
    Ok(RocSummary {
        finding,
        auroc: curve.area(),
        points: curve.points,
        calibrated_cutpoint: cal.cutpoint,
        sensitivity: cal.sensitivity,
        specificity: cal.specificity,
        youden_j: cal.youden_j,
        default_cutpoint,
        default_point: RocPoint {
            fpr: 1.0 - m.specificity.unwrap_or(1.0),
            tpr: m.sensitivity.unwrap_or(0.0),
        },
    })
}

/// ROC curve, AUROC and the Youden-optimal cutpoint for one finding as JSON.
#[wasm_bindgen(js_name = rocExplorer)]
pub fn roc_explorer(seed: u32, n: usize, signal: f64, finding: &str) -> Result<String, JsError> {
    let kind: FindingKind = finding.parse().map_err(to_js)?;
    roc_summary(seed, n, signal, kind).map(|s| json(&s)).map_err(to_js)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heatmap_has_demo_raster() {
        let h = heatmap_for(3, 1.0, 0.1).unwrap();
        assert_eq!((h.width, h.height), (DEMO_SIDE, DEMO_SIDE));
        assert_eq!(h.rgba.len(), DEMO_SIDE * DEMO_SIDE * 4);
        assert!(h.rgba.chunks(4).any(|p| p[3] > 0));
        assert!(heatmap_for(3, 1.0, 1.5).is_err());
    }

    #[test]
    fn perfect_signal_triage() {
        let s = triage_summary(9, 200, 1.0, *ThresholdConfig::default().cutpoints()).unwrap();
        assert_eq!(s.tasks.len(), 5);
        for t in &s.tasks {
            assert_eq!(t.sensitivity, Some(1.0), "{}", t.task);
            assert_eq!(t.specificity, Some(1.0), "{}", t.task);
            assert_eq!(t.flagged, t.positives);
        }
        assert_eq!(s.studies.len(), 12);
    }

    #[test]
    fn raising_a_cutpoint_never_flags_more() {
        let base = ThresholdConfig::default();
        let low = triage_summary(4, 150, 0.5, *base.cutpoints()).unwrap();
        let high = base.with_cutpoint(FindingKind::Fracture, 0.5).unwrap();
        let high = triage_summary(4, 150, 0.5, *high.cutpoints()).unwrap();
        assert!(high.tasks[4].flagged <= low.tasks[4].flagged);
        assert!(high.tasks[0].flagged <= low.tasks[0].flagged);
    }

    #[test]
    fn roc_summary_is_consistent() {
        let r = roc_summary(5, 300, 0.5, FindingKind::LungOpacity).unwrap();
        assert!(r.auroc > 0.6 && r.auroc < 0.9);
        assert!((r.sensitivity + r.specificity - 1.0 - r.youden_j).abs() < 1e-12);
        assert_eq!(r.default_cutpoint, 0.98);
        let json = json(&r);
        assert!(json.contains("\"calibratedCutpoint\""));
    }
}
