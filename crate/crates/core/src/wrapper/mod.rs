//! Wrapper feature selection: best-first forward search over feature
//! subsets, scored by the stratified-CV accuracy of the decision-tree
//! evaluator, stopping after a run of non-improving expansions.

mod evaluate;
mod folds;
mod search;
mod validate;

pub use evaluate::{evaluate_subset, SearchConfig, SubsetEvaluator};
pub use folds::{stratified_folds, stratified_subsample};
pub use search::{
    best_first_search, best_first_search_streamed, ChildRecord, ExpansionRecord, ResultRecord,
    SearchOutcome, SearchTrace, SubsampleInfo, TraceHeader, TraceRecord, MERIT_EPSILON,
    TRACE_VERSION,
};
pub use validate::validate_selection;
