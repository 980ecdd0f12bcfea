//! Cross-validated scoring and comparison tables.

mod compare;
mod experiment;
mod method;
mod metrics;
mod report;

pub use compare::{emit_comparison, improvement_percent, summary_table, Comparison};
pub use experiment::{run_cv_experiment, run_cv_experiment_cached, ExperimentConfig, GraphCache, StudyData};
pub use method::Method;
pub use metrics::{mae, rmse};
pub use report::{EvalReport, FoldMetrics, CSV_HEADER};
