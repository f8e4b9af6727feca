//! Classification metrics, annotator agreement and report tables.

mod kappa;
mod metrics;
mod report;

pub use kappa::{fleiss_kappa, AnnotationMatrix};
pub use metrics::{per_class_scores, weighted_avg_f1, ClassScores, ConfusionMatrix};
pub use report::{emit_report, emit_table, evaluate, parse_reports, EvalReport, ReportFormat, ReportMeta};
