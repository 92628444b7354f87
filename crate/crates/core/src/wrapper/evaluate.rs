use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::folds::stratified_folds;
use crate::dataset::Dataset;
use crate::dtree::{fit_view, Criterion, Induction, TrainingView, TreeParams};
use crate::error::{Error, Result};
use crate::preprocess::FeatureSubset;

/// Wrapper search configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Cross-validation folds behind the merit estimate.
    pub folds: usize,
    /// Stop after this many consecutive non-improving expansions; None
    /// disables the stop and exhausts the search space.
    pub termination: Option<usize>,
    pub seed: u64,
    /// The decision-tree feature evaluator.
    pub evaluator: TreeParams,
    /// Optional stratified row fraction for desk-scale runs.
    pub subsample: Option<f64>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            folds: 5,
            termination: Some(5),
            seed: 0,
            evaluator: TreeParams::default(),
            subsample: None,
        }
    }
}

/// Merit engine: mean stratified-CV accuracy of the tree evaluator on a
/// feature subset, memoized per distinct subset. The evaluator runs on raw
/// (unnormalized, unencoded) columns; the tree handles them natively.
pub struct SubsetEvaluator<'a> {
    data: &'a Dataset,
    fold_of: Vec<u32>,
    folds: usize,
    evaluator: TreeParams,
    cache: Mutex<HashMap<Vec<u32>, f64>>,
    fits: AtomicUsize,
}

impl<'a> SubsetEvaluator<'a> {
    pub fn new(data: &'a Dataset, cfg: &SearchConfig) -> Result<SubsetEvaluator<'a>> {
        cfg.evaluator.validate()?;
        let fold_of = stratified_folds(data, cfg.folds, cfg.seed)?;
        Ok(SubsetEvaluator {
            data,
            fold_of,
            folds: cfg.folds,
            evaluator: cfg.evaluator.clone(),
            cache: Mutex::new(HashMap::new()),
            fits: AtomicUsize::new(0),
        })
    }

    /// Pre-seed the memo cache, e.g. when resuming from a trace log.
    pub fn warm(&self, merits: &HashMap<Vec<String>, f64>) -> Result<()> {
        let mut cache = self.cache.lock().expect("cache lock");
        for (names, &merit) in merits {
            let mut positions = Vec::with_capacity(names.len());
            for name in names {
                let p = self
                    .data
                    .schema()
                    .position_of(name)
                    .ok_or_else(|| Error::UnknownColumn { name: name.clone() })?;
                positions.push(p as u32);
            }
            positions.sort_unstable();
            cache.insert(positions, merit);
        }
        Ok(())
    }

    pub fn merit(&self, subset: &FeatureSubset) -> Result<f64> {
        subset.validate(self.data.schema())?;
        let mut positions: Vec<u32> = subset
            .names()
            .iter()
            .map(|n| self.data.schema().position_of(n).expect("validated") as u32)
            .collect();
        positions.sort_unstable();
        self.merit_positions(&positions)
    }

    /// Merit of a canonical (ascending) position set.
    pub(crate) fn merit_positions(&self, positions: &[u32]) -> Result<f64> {
        if let Some(&merit) = self.cache.lock().expect("cache lock").get(positions) {
            return Ok(merit);
        }
        let merit = self.compute(positions)?;
        self.cache
            .lock()
            .expect("cache lock")
            .insert(positions.to_vec(), merit);
        Ok(merit)
    }

    fn compute(&self, positions: &[u32]) -> Result<f64> {
        let mask: Vec<usize> = positions.iter().map(|&p| p as usize).collect();
        let view = TrainingView::masked(self.data, &mask);
        let induction = Induction {
            criterion: Criterion::GainRatio,
            min_leaf: self.evaluator.min_leaf,
            max_depth: self.evaluator.max_depth,
            features_per_node: None,
            prune_confidence: Some(self.evaluator.pruning_confidence),
        };
        let labels = self.data.labels();

        // Fold accuracies computed in fold order; the mean is a fixed-order
        // reduction, so results do not depend on scheduling.
        let accuracies: Vec<f64> = (0..self.folds as u32)
            .into_par_iter()
            .map(|fold| {
                let train_rows: Vec<u32> = (0..self.fold_of.len() as u32)
                    .filter(|&r| self.fold_of[r as usize] != fold)
                    .collect();
                let tree = fit_view(&view, train_rows, &induction, None);
                self.fits.fetch_add(1, Ordering::Relaxed);
                let bound = tree.bind(self.data)?;
                let mut correct = 0usize;
                let mut total = 0usize;
                for r in 0..self.fold_of.len() {
                    if self.fold_of[r] == fold {
                        total += 1;
                        if tree.predict_bound(&bound, r) == labels[r] {
                            correct += 1;
                        }
                    }
                }
                Ok(correct as f64 / total as f64)
            })
            .collect::<Result<_>>()?;
        Ok(accuracies.iter().sum::<f64>() / accuracies.len() as f64)
    }

    /// Total evaluator tree fits so far (folds x distinct subsets).
    pub fn evaluator_fits(&self) -> usize {
        self.fits.load(Ordering::Relaxed)
    }

    /// Distinct subsets evaluated (or warmed) so far.
    pub fn distinct_subsets(&self) -> usize {
        self.cache.lock().expect("cache lock").len()
    }
}

/// One-shot merit of a subset: mean CV accuracy of the tree evaluator under
/// `cfg`, without a shared cache.
pub fn evaluate_subset(d: &Dataset, subset: &FeatureSubset, cfg: &SearchConfig) -> Result<f64> {
    SubsetEvaluator::new(d, cfg)?.merit(subset)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{Column, ColumnKind, Label, Schema};
    use crate::preprocess::project;

    /// 100 rows, 60 attack / 40 normal, so each of 5 folds holds exactly
    /// 12 attacks and 8 normals and fold accuracies are exact fractions.
    fn dataset() -> Dataset {
        let schema = Schema::new(vec![
            ("copy".into(), ColumnKind::Numeric),
            ("junk".into(), ColumnKind::Numeric),
            ("label".into(), ColumnKind::Label),
        ])
        .unwrap();
        let bits: Vec<u8> = (0..100).map(|i| u8::from(i % 5 != 0 && i % 5 != 1)).collect();
        Dataset::from_columns(
            schema,
            vec![
                Column::Numeric(bits.iter().map(|&b| b as f64).collect()),
                Column::Numeric((0..100).map(|i| ((i * 31) % 17) as f64).collect()),
                Column::Label(bits.iter().map(|&b| Label::from_bit(b).unwrap()).collect()),
            ],
        )
        .unwrap()
    }

    #[test]
    fn empty_subset_merit_is_the_majority_fraction() {
        let d = dataset();
        let merit = evaluate_subset(&d, &FeatureSubset::empty(), &SearchConfig::default()).unwrap();
        assert_eq!(merit, 0.6);
    }

    #[test]
    fn label_copy_feature_has_perfect_merit() {
        let d = dataset();
        let subset = FeatureSubset::new(vec!["copy".into()]).unwrap();
        let merit = evaluate_subset(&d, &subset, &SearchConfig::default()).unwrap();
        assert_eq!(merit, 1.0);
    }

    #[test]
    fn cache_returns_identical_merit_with_no_extra_fits() {
        let d = dataset();
        let cfg = SearchConfig::default();
        let evaluator = SubsetEvaluator::new(&d, &cfg).unwrap();
        let subset = FeatureSubset::new(vec!["junk".into()]).unwrap();
        let first = evaluator.merit(&subset).unwrap();
        let fits_after_first = evaluator.evaluator_fits();
        assert_eq!(fits_after_first, cfg.folds);
        let second = evaluator.merit(&subset).unwrap();
        assert_eq!(first, second);
        assert_eq!(evaluator.evaluator_fits(), fits_after_first);
        assert_eq!(evaluator.distinct_subsets(), 1);
    }

    #[test]
    fn masked_evaluation_equals_projected_evaluation() {
        let d = dataset();
        let cfg = SearchConfig::default();
        let subset = FeatureSubset::new(vec!["junk".into(), "copy".into()]).unwrap();
        let masked = evaluate_subset(&d, &subset, &cfg).unwrap();
        let projected_data = project(&d, &subset).unwrap();
        let projected = evaluate_subset(
            &projected_data,
            &FeatureSubset::new(vec!["copy".into(), "junk".into()]).unwrap(),
            &cfg,
        )
        .unwrap();
        assert_eq!(masked, projected);
    }

    #[test]
    fn warm_start_skips_fits() {
        let d = dataset();
        let cfg = SearchConfig::default();
        let evaluator = SubsetEvaluator::new(&d, &cfg).unwrap();
        let mut merits = HashMap::new();
        merits.insert(vec!["junk".to_string()], 0.123);
        evaluator.warm(&merits).unwrap();
        let subset = FeatureSubset::new(vec!["junk".into()]).unwrap();
        assert_eq!(evaluator.merit(&subset).unwrap(), 0.123);
        assert_eq!(evaluator.evaluator_fits(), 0);
    }
}
