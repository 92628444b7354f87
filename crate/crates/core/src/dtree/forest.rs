use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::split::Criterion;
use super::tree::{fit_view, DecisionTree, Induction};
use super::view::TrainingView;
use crate::dataset::{Dataset, Label};
use crate::error::{Error, Result};

/// Number of attributes sampled at each node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeaturesPerSplit {
    Sqrt,
    Count(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    pub features_per_split: FeaturesPerSplit,
    pub bootstrap: bool,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 100,
            features_per_split: FeaturesPerSplit::Sqrt,
            bootstrap: true,
            seed: 0,
        }
    }
}

impl ForestParams {
    pub fn validate(&self, attr_count: usize) -> Result<()> {
        if self.n_trees < 1 {
            return Err(Error::invalid_param("n_trees", "must be at least 1"));
        }
        if let FeaturesPerSplit::Count(m) = self.features_per_split {
            if m < 1 || m > attr_count {
                return Err(Error::invalid_param(
                    "features_per_split",
                    format!("must lie in 1..={attr_count}"),
                ));
            }
        }
        Ok(())
    }
}

/// Bagged ensemble of Gini trees grown to purity; prediction is a majority
/// vote with ties going to attack.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    trees: Vec<DecisionTree>,
    params: ForestParams,
}

impl RandomForest {
    /// Each tree trains on a bootstrap resample with `features_per_split`
    /// random candidate attributes per node. Per-tree seeds derive from the
    /// master seed, so parallel and serial training build identical forests.
    pub fn fit(train: &Dataset, params: &ForestParams) -> Result<RandomForest> {
        let attr_count = train.schema().attribute_count();
        params.validate(attr_count)?;
        if train.row_count() == 0 {
            return Err(Error::EmptyDataset);
        }
        let m = match params.features_per_split {
            FeaturesPerSplit::Sqrt => ((attr_count as f64).sqrt().floor() as usize).max(1),
            FeaturesPerSplit::Count(m) => m,
        };
        let view = TrainingView::all(train);
        let n = train.row_count();
        let induction = Induction {
            criterion: Criterion::Gini,
            min_leaf: 1,
            max_depth: None,
            features_per_node: (m < attr_count).then_some(m),
            prune_confidence: None,
        };

        let trees: Vec<DecisionTree> = (0..params.n_trees)
            .into_par_iter()
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(params.seed, t as u64));
                let rows: Vec<u32> = if params.bootstrap {
                    (0..n).map(|_| rng.random_range(0..n) as u32).collect()
                } else {
                    (0..n as u32).collect()
                };
                fit_view(&view, rows, &induction, Some(&mut rng))
            })
            .collect();

        Ok(RandomForest {
            trees,
            params: params.clone(),
        })
    }

    pub fn predict(&self, d: &Dataset) -> Result<Vec<Label>> {
        let votes = self.attack_votes(d)?;
        let majority = self.trees.len() as u32;
        Ok(votes
            .into_iter()
            .map(|v| {
                if 2 * v >= majority {
                    Label::Attack
                } else {
                    Label::Normal
                }
            })
            .collect())
    }

    /// Fraction of trees voting attack, per row.
    pub fn vote_fractions(&self, d: &Dataset) -> Result<Vec<f64>> {
        let votes = self.attack_votes(d)?;
        let n_trees = self.trees.len() as f64;
        Ok(votes.into_iter().map(|v| v as f64 / n_trees).collect())
    }

    fn attack_votes(&self, d: &Dataset) -> Result<Vec<u32>> {
        let per_tree: Vec<Vec<Label>> = self
            .trees
            .par_iter()
            .map(|tree| tree.predict(d))
            .collect::<Result<_>>()?;
        let mut votes = vec![0u32; d.row_count()];
        for predictions in &per_tree {
            for (vote, label) in votes.iter_mut().zip(predictions) {
                *vote += u32::from(label.is_attack());
            }
        }
        Ok(votes)
    }

    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }
}

/// SplitMix64 step over the master seed and tree index; decorrelates
/// per-tree streams regardless of index spacing.
fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master
        .wrapping_add(0x9e3779b97f4a7c15)
        .wrapping_add(index.wrapping_mul(0xbf58476d1ce4e5b9));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{generate_synthetic, SynthSpec};
    use crate::dtree::TreeParams;

    fn separable() -> Dataset {
        generate_synthetic(
            &SynthSpec {
                rows: 300,
                informative_numeric: 3,
                noise_numeric: 2,
                nominal_features: 1,
                class_balance: 0.5,
            },
            21,
        )
        .unwrap()
    }

    #[test]
    fn single_unsampled_tree_equals_plain_tree_predictions() {
        // A clean separator: both the Gini stump and the gain-ratio stump
        // cut at the same midpoint, so the reduction is exact.
        use crate::dataset::{Column, ColumnKind, Label, Schema};
        let schema = Schema::new(vec![
            ("x".into(), ColumnKind::Numeric),
            ("label".into(), ColumnKind::Label),
        ])
        .unwrap();
        let d = Dataset::from_columns(
            schema,
            vec![
                Column::Numeric((0..80).map(|i| i as f64).collect()),
                Column::Label(
                    (0..80)
                        .map(|i| if i >= 40 { Label::Attack } else { Label::Normal })
                        .collect(),
                ),
            ],
        )
        .unwrap();
        let forest = RandomForest::fit(
            &d,
            &ForestParams {
                n_trees: 1,
                features_per_split: FeaturesPerSplit::Count(1),
                bootstrap: false,
                seed: 0,
            },
        )
        .unwrap();
        let tree = crate::dtree::DecisionTree::fit(
            &d,
            &TreeParams {
                min_leaf: 1,
                ..TreeParams::default()
            },
        )
        .unwrap();
        assert_eq!(forest.predict(&d).unwrap(), tree.predict(&d).unwrap());
    }

    #[test]
    fn same_seed_gives_identical_predictions() {
        let d = separable();
        let held_out = generate_synthetic(
            &SynthSpec {
                rows: 100,
                informative_numeric: 3,
                noise_numeric: 2,
                nominal_features: 1,
                class_balance: 0.5,
            },
            99,
        )
        .unwrap();
        let params = ForestParams {
            n_trees: 15,
            seed: 42,
            ..ForestParams::default()
        };
        let a = RandomForest::fit(&d, &params).unwrap();
        let b = RandomForest::fit(&d, &params).unwrap();
        assert_eq!(a, b);
        assert_eq!(
            a.predict(&held_out).unwrap(),
            b.predict(&held_out).unwrap()
        );
    }

    #[test]
    fn vote_fraction_threshold_reproduces_predict() {
        let d = separable();
        let forest = RandomForest::fit(
            &d,
            &ForestParams {
                n_trees: 9,
                seed: 1,
                ..ForestParams::default()
            },
        )
        .unwrap();
        let fractions = forest.vote_fractions(&d).unwrap();
        let pred = forest.predict(&d).unwrap();
        for (f, p) in fractions.iter().zip(&pred) {
            assert_eq!(*f >= 0.5, p.is_attack());
        }
    }

    #[test]
    fn params_are_validated() {
        let d = separable();
        assert!(RandomForest::fit(
            &d,
            &ForestParams {
                n_trees: 0,
                ..ForestParams::default()
            }
        )
        .is_err());
        assert!(RandomForest::fit(
            &d,
            &ForestParams {
                features_per_split: FeaturesPerSplit::Count(1000),
                ..ForestParams::default()
            }
        )
        .is_err());
    }
}
