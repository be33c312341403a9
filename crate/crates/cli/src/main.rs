//! `trx`: command-line front end for the triage toolkit.
//!
//! Exit status is 0 on success, 2 when the data cannot support the
//! requested statistic and 1 for every other error.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};

use trx_core::compositor::{render_study_layers, unify_heatmaps, ColorScale};
use trx_core::fusion::{calibrate_threshold, run_pipeline, ScoredCase};
use trx_core::harness::evaluate::{evaluate_cohort, EvalOptions, Subgrouping, DEFAULT_AGE_EDGES, DEFAULT_PERMUTATIONS};
use trx_core::harness::formats::{load_cam, load_raw_outputs, load_study_by_id, read_json, write_json};
use trx_core::harness::labels_csv::{read_labels, write_merged_labels_to};
use trx_core::harness::synth::{synth_cohort, CohortSpec};
use trx_core::labelset::{
    apply_selection_filters, patient_level_split, Decision, FilterRules, LabelRecord, NO_FINDING, SUPPORT_DEVICES,
};
use trx_core::metrics::{DEFAULT_LEVEL, DEFAULT_RESAMPLES};
use trx_core::{FindingKind, LabelState, ThresholdConfig, TrxError};

#[derive(Parser)]
#[command(name = "trx", version, about = "Late-fusion chest x-ray triage toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic cohort (outputs directory plus labels.csv).
    Synth {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Patient-level train/tune split.
    Split {
        #[arg(long)]
        labels: PathBuf,
        #[arg(long, default_value_t = trx_core::labelset::DEFAULT_TUNE_FRACTION)]
        tune_fraction: f64,
        #[arg(long)]
        seed: u64,
        /// Stratify on this category instead of "any confirmed finding".
        #[arg(long)]
        positive_category: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Unify the opacity sources and write soft training targets.
    MergeLabels {
        #[arg(long)]
        labels: PathBuf,
        /// Apply the opacity training-set selection filters first.
        #[arg(long)]
        filter: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Youden-optimal cutpoint for one finding.
    Calibrate {
        #[arg(long)]
        outputs: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        #[arg(long)]
        finding: FindingKind,
        /// Thresholds to start from; the published cutpoints by default.
        #[arg(long)]
        base: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Per-study scores, flags and the fused verdict as CSV.
    Triage {
        #[arg(long)]
        outputs: PathBuf,
        #[arg(long)]
        thresholds: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Unified RGBA heatmap of one study as PNG.
    Render {
        #[arg(long)]
        outputs: PathBuf,
        #[arg(long)]
        study: String,
        #[arg(long, default_value_t = 0.1)]
        activation_floor: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Five-task evaluation report with bootstrap intervals.
    Evaluate {
        #[arg(long)]
        outputs: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        #[arg(long)]
        thresholds: Option<PathBuf>,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        subgroup: Option<SubgroupArg>,
        /// Ascending age-band edges, e.g. "40,65" for <40, 40-64, >=65.
        #[arg(long, value_delimiter = ',')]
        age_bands: Option<Vec<u32>>,
        #[arg(long, default_value_t = DEFAULT_RESAMPLES)]
        n_resamples: usize,
        #[arg(long, default_value_t = DEFAULT_LEVEL)]
        level: f64,
        #[arg(long, default_value_t = DEFAULT_PERMUTATIONS)]
        n_perm: usize,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SubgroupArg {
    Sex,
    Ageband,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            let degenerate = err
                .chain()
                .any(|e| e.downcast_ref::<TrxError>().is_some_and(TrxError::is_degenerate));
            ExitCode::from(if degenerate { 2 } else { 1 })
        }
    }
}

fn run(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Synth { spec, out } => {
            let spec: CohortSpec = read_json(&spec)?;
            let cohort = synth_cohort(&spec)?;
            cohort.write(&out)?;
            eprintln!("wrote {} studies to {}", cohort.outputs.len(), out.display());
        }
        Command::Split {
            labels,
            tune_fraction,
            seed,
            positive_category,
            out,
        } => {
            let records = read_labels(&labels)?;
            let manifest = match positive_category {
                Some(cat) => patient_level_split(&records, |r| r.state(&cat).is_positive(), tune_fraction, seed)?,
                None => patient_level_split(&records, any_confirmed_finding, tune_fraction, seed)?,
            };
            write_json(&out, &manifest)?;
            eprintln!(
                "train {} / tune {} studies",
                manifest.train_ids.len(),
                manifest.tune_ids.len()
            );
        }
        Command::MergeLabels { labels, filter, out } => {
            let mut records = read_labels(&labels)?;
            if filter {
                let rules = FilterRules::opacity_training();
                let before = records.len();
                records.retain(|r| matches!(apply_selection_filters(r, &rules), Decision::Keep));
                eprintln!("kept {} of {before} studies", records.len());
            }
            let file = File::create(&out).with_context(|| format!("creating {}", out.display()))?;
            write_merged_labels_to(BufWriter::new(file), &records)?;
        }
        Command::Calibrate {
            outputs,
            labels,
            finding,
            base,
            out,
        } => {
            let base = load_thresholds(base.as_deref())?;
            let studies = load_raw_outputs(&outputs)?;
            let records = read_labels(&labels)?;
            let by_id: std::collections::BTreeMap<&str, &LabelRecord> =
                records.iter().map(|r| (r.study_id.as_str(), r)).collect();
            let cases = studies
                .iter()
                .map(|s| {
                    let label = by_id
                        .get(s.study_id())
                        .with_context(|| format!("no label for study {}", s.study_id()))?
                        .state(finding.label_column())
                        .is_positive();
                    Ok(ScoredCase::new(trx_core::fusion::score_of(s.get(finding)), label))
                })
                .collect::<anyhow::Result<Vec<_>>>()?;
            let report = calibrate_threshold(&cases)?;
            if !report.cutpoint.is_finite() {
                return Err(TrxError::Degenerate(format!(
                    "no finite cutpoint separates the {finding} tuning set (J = {})",
                    report.youden_j
                ))
                .into());
            }
            let thresholds = base.with_cutpoint(finding, report.cutpoint)?;
            write_json(&out, &thresholds)?;
            println!(
                "{finding}: cutpoint {} sensitivity {:.4} specificity {:.4} J {:.4}",
                report.cutpoint, report.sensitivity, report.specificity, report.youden_j
            );
        }
        Command::Triage {
            outputs,
            thresholds,
            out,
        } => {
            let cfg = load_thresholds(thresholds.as_deref())?;
            let studies = load_raw_outputs(&outputs)?;
            let mut w = csv::Writer::from_path(&out).with_context(|| format!("creating {}", out.display()))?;
            let mut header = vec!["studyId".to_string()];
            header.extend(FindingKind::ALL.iter().map(|k| format!("{}Score", k.key())));
            header.extend(FindingKind::ALL.iter().map(|k| format!("{}Flag", k.key())));
            header.push("abnormal".to_string());
            w.write_record(&header)?;
            let mut flagged = 0;
            for s in &studies {
                let r = run_pipeline(s, &cfg);
                flagged += r.abnormal as usize;
                let mut row = vec![r.study_id.clone()];
                row.extend(r.scores.values().map(|v| v.to_string()));
                row.extend(r.flags.values().map(|f| (*f as u8).to_string()));
                row.push((r.abnormal as u8).to_string());
                w.write_record(&row)?;
            }
            w.flush()?;
            eprintln!("{flagged} of {} studies flagged abnormal", studies.len());
        }
        Command::Render {
            outputs,
            study,
            activation_floor,
            out,
        } => {
            let outs = load_study_by_id(&outputs, &study)?;
            let cam = load_cam(&outputs, &study)?;
            let layers = render_study_layers(&outs, cam.as_ref(), &ColorScale::new(activation_floor)?)?;
            let unified = unify_heatmaps(&layers)?;
            write_png(&out, unified.width(), unified.height(), &unified.to_rgba_bytes())?;
        }
        Command::Evaluate {
            outputs,
            labels,
            thresholds,
            seed,
            subgroup,
            age_bands,
            n_resamples,
            level,
            n_perm,
            workers,
            out,
        } => {
            let cfg = load_thresholds(thresholds.as_deref())?;
            let subgroup = match (subgroup, age_bands) {
                (Some(SubgroupArg::Sex), None) => Some(Subgrouping::Sex),
                (Some(SubgroupArg::Ageband), edges) => Some(Subgrouping::AgeBand(
                    edges.unwrap_or_else(|| DEFAULT_AGE_EDGES.to_vec()),
                )),
                (_, Some(_)) => bail!("--age-bands requires --subgroup ageband"),
                (None, None) => None,
            };
            let opts = EvalOptions {
                n_resamples,
                level,
                workers,
                subgroup,
                n_permutations: n_perm,
                ..EvalOptions::new(seed)
            };
            let studies = load_raw_outputs(&outputs)?;
            let records = read_labels(&labels)?;
            let report = evaluate_cohort(&studies, &records, &cfg, &opts)?;
            write_json(&out, &report)?;
            for t in &report.tasks {
                match &t.auroc {
                    Some(a) => println!("{:<17} AUROC {:.4}", t.task, a.value),
                    None => println!("{:<17} unavailable", t.task),
                }
            }
        }
    }
    Ok(())
}

/// Stratification default: any confirmed-positive category other than the
/// bookkeeping columns.
fn any_confirmed_finding(r: &LabelRecord) -> bool {
    r.categories
        .iter()
        .any(|(cat, &s)| s == LabelState::ConfirmedPositive && cat != NO_FINDING && cat != SUPPORT_DEVICES)
}

fn load_thresholds(path: Option<&Path>) -> anyhow::Result<ThresholdConfig> {
    Ok(match path {
        Some(p) => read_json(p)?,
        None => ThresholdConfig::default(),
    })
}

fn write_png(path: &Path, width: usize, height: usize, rgba: &[u8]) -> anyhow::Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut enc = png::Encoder::new(BufWriter::new(file), width as u32, height as u32);
    enc.set_color(png::ColorType::Rgba);
    enc.set_depth(png::BitDepth::Eight);
    enc.write_header()?.write_image_data(rgba)?;
    Ok(())
}
