//! Confusion-matrix metrics, model-building-time measurement, and the
//! benchmark runner that produces the feature-set-by-classifier grid.

mod bench;
mod confusion;
mod report;

pub use bench::{
    humanize_seconds, preprocess_pair, render_performance, render_timing, reports_to_csv,
    run_benchmark, BenchConfig, BenchOutcome, FeatureSetSpec, PrepInfo,
};
pub use confusion::{confusion, percent, percent_or_undefined, ConfusionMatrix};
pub use report::{time_fit_eval, EvalReport};
