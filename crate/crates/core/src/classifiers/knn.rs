use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::numeric::{matching_matrix, numeric_matrix, NumericMatrix};
use crate::dataset::{Dataset, Label};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnParams {
    pub k: usize,
}

impl Default for KnnParams {
    fn default() -> Self {
        KnnParams { k: 5 }
    }
}

/// Brute-force Euclidean k-nearest-neighbor classifier. There is no fit work
/// beyond storing the training matrix; queries select the k smallest
/// distances exactly, with ties on distance broken by row index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    params: KnnParams,
    train: NumericMatrix,
    labels: Vec<Label>,
}

impl KnnModel {
    pub fn fit(train: &Dataset, params: &KnnParams) -> Result<KnnModel> {
        if params.k < 1 {
            return Err(Error::invalid_param("k", "must be at least 1"));
        }
        if train.row_count() == 0 {
            return Err(Error::EmptyDataset);
        }
        let (matrix, labels) = numeric_matrix(train, "knn")?;
        Ok(KnnModel {
            params: params.clone(),
            train: matrix,
            labels: labels.to_vec(),
        })
    }

    pub fn predict(&self, d: &Dataset) -> Result<Vec<Label>> {
        Ok(self
            .neighbor_attack_fractions(d)?
            .into_iter()
            .map(|f| if f >= 0.5 { Label::Attack } else { Label::Normal })
            .collect())
    }

    /// Attack fraction among the k nearest training rows, per query row.
    pub fn neighbor_attack_fractions(&self, d: &Dataset) -> Result<Vec<f64>> {
        let queries = matching_matrix(d, &self.train.cols, "knn")?;
        let k = self.params.k.min(self.train.rows);
        Ok((0..queries.rows)
            .into_par_iter()
            .map(|q| {
                let query = queries.row(q);
                let mut distances: Vec<(f64, u32)> = (0..self.train.rows)
                    .map(|t| (squared_distance(query, self.train.row(t)), t as u32))
                    .collect();
                let order = |a: &(f64, u32), b: &(f64, u32)| {
                    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
                };
                if k < distances.len() {
                    distances.select_nth_unstable_by(k - 1, order);
                }
                let attacks = distances[..k]
                    .iter()
                    .filter(|&&(_, t)| self.labels[t as usize].is_attack())
                    .count();
                attacks as f64 / k as f64
            })
            .collect())
    }
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    // Four fixed-order accumulators: vectorizes well and keeps summation
    // order independent of thread count.
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for i in 0..chunks {
        for lane in 0..4 {
            let j = i * 4 + lane;
            let d = a[j] - b[j];
            acc[lane] += d * d;
        }
    }
    let mut tail = 0.0;
    for j in chunks * 4..a.len() {
        let d = a[j] - b[j];
        tail += d * d;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn squared_distance_matches_naive() {
        let a: Vec<f64> = (0..13).map(|i| i as f64 * 0.7).collect();
        let b: Vec<f64> = (0..13).map(|i| (13 - i) as f64 * 0.3).collect();
        let naive: f64 = a.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).sum();
        assert!((squared_distance(&a, &b) - naive).abs() < 1e-9);
    }
}

#[cfg(test)]
mod knn_tests {
    use super::*;
    use crate::dataset::{Column, ColumnKind, Schema};

    fn numeric_dataset(points: &[(f64, f64, u8)]) -> Dataset {
        let schema = Schema::new(vec![
            ("x".into(), ColumnKind::Numeric),
            ("y".into(), ColumnKind::Numeric),
            ("label".into(), ColumnKind::Label),
        ])
        .unwrap();
        Dataset::from_columns(
            schema,
            vec![
                Column::Numeric(points.iter().map(|p| p.0).collect()),
                Column::Numeric(points.iter().map(|p| p.1).collect()),
                Column::Label(points.iter().map(|p| Label::from_bit(p.2).unwrap()).collect()),
            ],
        )
        .unwrap()
    }

    #[test]
    fn majority_vote_of_three_neighbors() {
        // Neighbors of the origin at distance 1, labels [1,1,0]; the far
        // point never enters the vote.
        let train = numeric_dataset(&[
            (1.0, 0.0, 1),
            (0.0, 1.0, 1),
            (-1.0, 0.0, 0),
            (50.0, 50.0, 0),
        ]);
        let model = KnnModel::fit(&train, &KnnParams { k: 3 }).unwrap();
        let query = numeric_dataset(&[(0.0, 0.0, 0)]);
        assert_eq!(model.predict(&query).unwrap(), vec![Label::Attack]);
        assert_eq!(
            model.neighbor_attack_fractions(&query).unwrap(),
            vec![2.0 / 3.0]
        );
    }

    #[test]
    fn k1_reproduces_training_labels_without_conflicts() {
        let train = numeric_dataset(&[
            (0.0, 0.0, 0),
            (1.0, 0.0, 1),
            (0.0, 1.0, 1),
            (1.0, 1.0, 0),
            (0.5, 2.0, 1),
        ]);
        let model = KnnModel::fit(&train, &KnnParams { k: 1 }).unwrap();
        assert_eq!(model.predict(&train).unwrap(), train.labels());
    }

    #[test]
    fn even_vote_tie_predicts_attack() {
        let train = numeric_dataset(&[(1.0, 0.0, 1), (-1.0, 0.0, 0)]);
        let model = KnnModel::fit(&train, &KnnParams { k: 2 }).unwrap();
        let query = numeric_dataset(&[(0.0, 0.0, 0)]);
        assert_eq!(model.predict(&query).unwrap(), vec![Label::Attack]);
    }

    #[test]
    fn uniform_scaling_of_all_features_preserves_predictions() {
        let train = numeric_dataset(&[
            (0.1, 0.4, 0),
            (0.9, 0.2, 1),
            (0.3, 0.8, 1),
            (0.7, 0.6, 0),
            (0.2, 0.2, 0),
            (0.8, 0.9, 1),
        ]);
        let queries = numeric_dataset(&[(0.5, 0.5, 0), (0.25, 0.3, 0), (0.75, 0.75, 0)]);
        let scale = |d: &Dataset, s: f64| {
            let cols = (0..d.schema().len())
                .map(|p| match d.column(p) {
                    Column::Numeric(v) => Column::Numeric(v.iter().map(|x| x * s).collect()),
                    other => other.clone(),
                })
                .collect();
            Dataset::from_columns(d.schema().clone(), cols).unwrap()
        };
        let base = KnnModel::fit(&train, &KnnParams::default())
            .unwrap()
            .predict(&queries)
            .unwrap();
        let scaled = KnnModel::fit(&scale(&train, 7.5), &KnnParams::default())
            .unwrap()
            .predict(&scale(&queries, 7.5))
            .unwrap();
        assert_eq!(base, scaled);
    }

    #[test]
    fn rejects_nominal_columns_and_schema_drift() {
        use crate::dataset::NominalColumn;
        let schema = Schema::new(vec![
            ("x".into(), ColumnKind::Numeric),
            ("p".into(), ColumnKind::Nominal),
            ("label".into(), ColumnKind::Label),
        ])
        .unwrap();
        let mixed = Dataset::from_columns(
            schema,
            vec![
                Column::Numeric(vec![1.0]),
                Column::Nominal(NominalColumn::from_values(["a"])),
                Column::Label(vec![Label::Attack]),
            ],
        )
        .unwrap();
        assert!(matches!(
            KnnModel::fit(&mixed, &KnnParams::default()).unwrap_err(),
            Error::NonNumericInput { .. }
        ));

        let train = numeric_dataset(&[(0.0, 0.0, 0), (1.0, 1.0, 1)]);
        let model = KnnModel::fit(&train, &KnnParams { k: 1 }).unwrap();
        let narrower = Dataset::from_columns(
            Schema::new(vec![
                ("x".into(), ColumnKind::Numeric),
                ("label".into(), ColumnKind::Label),
            ])
            .unwrap(),
            vec![Column::Numeric(vec![0.5]), Column::Label(vec![Label::Normal])],
        )
        .unwrap();
        assert!(matches!(
            model.predict(&narrower).unwrap_err(),
            Error::SchemaMismatch { .. }
        ));
    }
}
