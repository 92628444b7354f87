//! Decision-tree induction in the C4.5 family: gain-ratio splits over mixed
//! numeric/nominal attributes with pessimistic-error pruning, plus a bagged
//! random forest of Gini trees. The gain-ratio tree doubles as the wrapper's
//! feature evaluator.

mod forest;
mod prune;
mod split;
mod tree;
mod view;

pub use forest::{FeaturesPerSplit, ForestParams, RandomForest};
pub use split::{best_numeric_threshold, entropy, gain_ratio, SplitSpec, ThresholdSearch};
pub use tree::{DecisionTree, TreeParams};

pub(crate) use split::Criterion;
pub(crate) use tree::{fit_view, Induction};
pub(crate) use view::TrainingView;
