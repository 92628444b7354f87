use serde::{Deserialize, Serialize};

use crate::dataset::{Column, ColumnKind, Dataset};
use crate::error::{Error, Result};

const VERSION: u32 = 1;

/// Per-column min/max fitted on training rows only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizerStats {
    version: u32,
    columns: Vec<ColumnStats>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ColumnStats {
    name: String,
    min: f64,
    max: f64,
}

impl NormalizerStats {
    pub fn get(&self, name: &str) -> Option<(f64, f64)> {
        self.columns
            .iter()
            .find(|c| c.name == name)
            .map(|c| (c.min, c.max))
    }

    pub fn column_count(&self) -> usize {
        self.columns.len()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(json: &str) -> Result<NormalizerStats> {
        let stats: NormalizerStats = serde_json::from_str(json)?;
        if stats.version != VERSION {
            return Err(Error::Artifact {
                reason: format!(
                    "normalizer version {} is not supported (expected {VERSION})",
                    stats.version
                ),
            });
        }
        Ok(stats)
    }
}

/// Column minima and maxima over the training rows. Errors on an empty
/// dataset; covers exactly the numeric columns of `train`.
pub fn fit_minmax(train: &Dataset) -> Result<NormalizerStats> {
    if train.row_count() == 0 {
        return Err(Error::EmptyDataset);
    }
    let mut columns = Vec::new();
    for meta in train.schema().columns() {
        if meta.kind != ColumnKind::Numeric {
            continue;
        }
        let values = train
            .column(meta.position)
            .as_numeric()
            .expect("numeric kind holds numeric column");
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for &v in values {
            min = min.min(v);
            max = max.max(v);
        }
        columns.push(ColumnStats {
            name: meta.name.clone(),
            min,
            max,
        });
    }
    Ok(NormalizerStats {
        version: VERSION,
        columns,
    })
}

/// Map every numeric cell through `(x - min) / (max - min)` with the fitted
/// stats. Nominal columns and labels pass through untouched. Zero-range
/// columns map to 0; values outside the fitted range are not clipped.
pub fn apply_minmax(stats: &NormalizerStats, d: &Dataset) -> Result<Dataset> {
    let mut columns = Vec::with_capacity(d.schema().len());
    for meta in d.schema().columns() {
        let col = d.column(meta.position);
        let rescaled = match col {
            Column::Numeric(values) => {
                let (min, max) = stats.get(&meta.name).ok_or_else(|| Error::NotFitted {
                    artifact: "normalizer".to_string(),
                    name: meta.name.clone(),
                })?;
                let range = max - min;
                let values = if range == 0.0 {
                    vec![0.0; values.len()]
                } else {
                    values.iter().map(|&x| (x - min) / range).collect()
                };
                Column::Numeric(values)
            }
            other => other.clone(),
        };
        columns.push(rescaled);
    }
    Dataset::from_columns(d.schema().clone(), columns)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{ColumnKind, Label, NominalColumn, Schema};

    fn dataset(values: Vec<f64>) -> Dataset {
        let n = values.len();
        let schema = Schema::new(vec![
            ("x".into(), ColumnKind::Numeric),
            ("proto".into(), ColumnKind::Nominal),
            ("label".into(), ColumnKind::Label),
        ])
        .unwrap();
        Dataset::from_columns(
            schema,
            vec![
                Column::Numeric(values),
                Column::Nominal(NominalColumn::from_values(vec!["a"; n])),
                Column::Label(vec![Label::Attack; n]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn fit_covers_numeric_columns_only() {
        let stats = fit_minmax(&dataset(vec![2.0, 6.0, 10.0])).unwrap();
        assert_eq!(stats.column_count(), 1);
        assert_eq!(stats.get("x"), Some((2.0, 10.0)));
        assert_eq!(stats.get("proto"), None);
    }

    #[test]
    fn fit_constant_column() {
        let stats = fit_minmax(&dataset(vec![5.0, 5.0, 5.0])).unwrap();
        assert_eq!(stats.get("x"), Some((5.0, 5.0)));
    }

    #[test]
    fn fit_rejects_empty_dataset() {
        assert!(matches!(
            fit_minmax(&dataset(vec![])).unwrap_err(),
            Error::EmptyDataset
        ));
    }

    #[test]
    fn apply_maps_midpoint_and_endpoints() {
        let train = dataset(vec![2.0, 6.0, 10.0]);
        let stats = fit_minmax(&train).unwrap();
        let out = apply_minmax(&stats, &train).unwrap();
        assert_eq!(out.column(0).as_numeric().unwrap(), &[0.0, 0.5, 1.0]);
    }

    #[test]
    fn apply_does_not_clip_out_of_range_values() {
        let stats = fit_minmax(&dataset(vec![2.0, 10.0])).unwrap();
        let out = apply_minmax(&stats, &dataset(vec![14.0, -2.0])).unwrap();
        assert_eq!(out.column(0).as_numeric().unwrap(), &[1.5, -0.5]);
    }

    #[test]
    fn zero_range_column_maps_to_zero_without_nan() {
        let train = dataset(vec![5.0, 5.0, 5.0]);
        let stats = fit_minmax(&train).unwrap();
        let out = apply_minmax(&stats, &train).unwrap();
        let values = out.column(0).as_numeric().unwrap();
        assert_eq!(values, &[0.0, 0.0, 0.0]);
        assert!(values.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn apply_rejects_uncovered_column() {
        let stats = fit_minmax(&dataset(vec![1.0])).unwrap();
        let other = Dataset::from_columns(
            Schema::new(vec![
                ("y".into(), ColumnKind::Numeric),
                ("label".into(), ColumnKind::Label),
            ])
            .unwrap(),
            vec![Column::Numeric(vec![1.0]), Column::Label(vec![Label::Normal])],
        )
        .unwrap();
        assert!(matches!(
            apply_minmax(&stats, &other).unwrap_err(),
            Error::NotFitted { .. }
        ));
    }

    #[test]
    fn json_round_trip_and_version_check() {
        let stats = fit_minmax(&dataset(vec![2.0, 6.0])).unwrap();
        let json = stats.to_json().unwrap();
        assert_eq!(NormalizerStats::from_json(&json).unwrap(), stats);
        let bad = json.replace("\"version\": 1", "\"version\": 99");
        assert!(NormalizerStats::from_json(&bad).is_err());
    }
}
