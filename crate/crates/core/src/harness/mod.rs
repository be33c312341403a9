//! File formats, the synthetic cohort generator and cohort evaluation.

pub mod evaluate;
pub mod formats;
pub mod labels_csv;
pub mod synth;

pub use evaluate::{abnormality_score, evaluate_cohort, EvalOptions, EvalReport, Subgrouping, TaskReport};
pub use formats::{load_raw_outputs, read_json, write_json};
pub use labels_csv::{parse_labels, read_labels, write_labels};
pub use synth::{synth_cohort, CohortSpec, SynthCohort};
