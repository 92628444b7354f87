use serde::{Deserialize, Serialize};

use crate::dataset::{Column, ColumnKind, Dataset, Label};
use crate::error::{Error, Result};

/// Row-major numeric feature matrix extracted from a fully numeric dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub(crate) struct NumericMatrix {
    pub data: Vec<f64>,
    pub rows: usize,
    pub cols: Vec<String>,
}

impl NumericMatrix {
    pub fn row(&self, r: usize) -> &[f64] {
        let w = self.cols.len();
        &self.data[r * w..(r + 1) * w]
    }

    pub fn width(&self) -> usize {
        self.cols.len()
    }
}

/// Extract features and labels for a numeric-only classifier. Errors when
/// `d` still contains nominal columns.
pub(crate) fn numeric_matrix<'a>(
    d: &'a Dataset,
    kind: &str,
) -> Result<(NumericMatrix, &'a [Label])> {
    let mut cols = Vec::new();
    let mut columns: Vec<&[f64]> = Vec::new();
    for meta in d.schema().columns() {
        match (meta.kind, d.column(meta.position)) {
            (ColumnKind::Numeric, Column::Numeric(v)) => {
                cols.push(meta.name.clone());
                columns.push(v);
            }
            (ColumnKind::Nominal, _) => {
                return Err(Error::NonNumericInput {
                    kind: kind.to_string(),
                    column: meta.name.clone(),
                })
            }
            _ => {}
        }
    }
    let rows = d.row_count();
    let mut data = Vec::with_capacity(rows * columns.len());
    for r in 0..rows {
        for col in &columns {
            data.push(col[r]);
        }
    }
    Ok((NumericMatrix { data, rows, cols }, d.labels()))
}

/// Check that prediction data carries exactly the training feature columns,
/// in order, then extract it.
pub(crate) fn matching_matrix(d: &Dataset, trained_cols: &[String], kind: &str) -> Result<NumericMatrix> {
    let (matrix, _) = numeric_matrix(d, kind)?;
    if matrix.cols != trained_cols {
        return Err(Error::SchemaMismatch {
            reason: format!(
                "{kind} was fit on {} feature columns but the data has {} ({})",
                trained_cols.len(),
                matrix.cols.len(),
                first_difference(trained_cols, &matrix.cols),
            ),
        });
    }
    Ok(matrix)
}

fn first_difference(expected: &[String], found: &[String]) -> String {
    for (i, e) in expected.iter().enumerate() {
        match found.get(i) {
            Some(f) if f == e => continue,
            Some(f) => return format!("column {i} is {f:?}, expected {e:?}"),
            None => return format!("column {i} ({e:?}) is missing"),
        }
    }
    format!("unexpected extra column {:?}", found[expected.len()])
}
