use crate::classifiers::ClassifierSpec;
use crate::dataset::Dataset;
use crate::error::Result;
use crate::metrics::{preprocess_pair, time_fit_eval, EvalReport};
use crate::preprocess::FeatureSubset;

/// Validate a selected subset end to end: project both splits onto it,
/// normalize with training stats, one-hot encode, fit the classifier on the
/// training rows, and score the testing rows.
pub fn validate_selection(
    train: &Dataset,
    test: &Dataset,
    subset: &FeatureSubset,
    spec: &ClassifierSpec,
) -> Result<EvalReport> {
    let (train_enc, test_enc, _) = preprocess_pair(train, test, subset)?;
    time_fit_eval(spec, &train_enc, &test_enc, 1)
}
