use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::schema::{ColumnKind, Schema};
use super::table::{Column, Dataset, Label, NominalBuilder};
use crate::error::{Error, Result};

/// Shape of a synthetic labeled dataset.
///
/// Informative numeric features are drawn from class-conditional normals with
/// separated means, noise features are label-independent, and nominal
/// features have label-correlated category frequencies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub rows: usize,
    pub informative_numeric: usize,
    pub noise_numeric: usize,
    pub nominal_features: usize,
    /// Attack fraction, in (0, 1).
    pub class_balance: f64,
}

/// Mean shift of the attack class on informative features, in units of the
/// feature's standard deviation.
const INFORMATIVE_SHIFT: f64 = 2.0;

/// Category frequencies of nominal features, attack class; the normal class
/// uses the reverse order.
const NOMINAL_WEIGHTS: [f64; 4] = [0.55, 0.25, 0.15, 0.05];

impl SynthSpec {
    fn validate(&self) -> Result<()> {
        if self.rows < 1 {
            return Err(Error::invalid_param("rows", "must be at least 1"));
        }
        if !(self.class_balance > 0.0 && self.class_balance < 1.0) {
            return Err(Error::invalid_param(
                "class_balance",
                "must lie strictly between 0 and 1",
            ));
        }
        Ok(())
    }

    /// Schema of the generated dataset: informative features named `inf*`,
    /// noise features `noise*`, nominal features `cat*`, and a `label` column.
    pub fn schema(&self) -> Schema {
        let mut cols = Vec::new();
        for i in 0..self.informative_numeric {
            cols.push((format!("inf{i}"), ColumnKind::Numeric));
        }
        for i in 0..self.noise_numeric {
            cols.push((format!("noise{i}"), ColumnKind::Numeric));
        }
        for i in 0..self.nominal_features {
            cols.push((format!("cat{i}"), ColumnKind::Nominal));
        }
        cols.push(("label".to_string(), ColumnKind::Label));
        Schema::new(cols).expect("synthetic schema is valid")
    }
}

/// Generate a labeled dataset per `spec`, bitwise-deterministic for a seed.
///
/// The class split is exact up to rounding: `round(rows * class_balance)`
/// rows are attacks, assigned to shuffled positions.
pub fn generate_synthetic(spec: &SynthSpec, seed: u64) -> Result<Dataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let attack_count = ((spec.rows as f64) * spec.class_balance).round() as usize;
    let attack_count = attack_count.min(spec.rows);
    let mut labels: Vec<Label> = (0..spec.rows)
        .map(|i| {
            if i < attack_count {
                Label::Attack
            } else {
                Label::Normal
            }
        })
        .collect();
    labels.shuffle(&mut rng);

    let unit = Normal::new(0.0, 1.0).expect("unit normal");
    let mut columns = Vec::with_capacity(spec.informative_numeric + spec.noise_numeric + spec.nominal_features + 1);

    for _ in 0..spec.informative_numeric {
        let values = labels
            .iter()
            .map(|l| {
                let shift = if l.is_attack() { INFORMATIVE_SHIFT } else { 0.0 };
                shift + unit.sample(&mut rng)
            })
            .collect();
        columns.push(Column::Numeric(values));
    }
    for _ in 0..spec.noise_numeric {
        let values = labels.iter().map(|_| unit.sample(&mut rng)).collect();
        columns.push(Column::Numeric(values));
    }
    for _ in 0..spec.nominal_features {
        let mut builder = NominalBuilder::new();
        for l in &labels {
            let u: f64 = rng.random();
            let k = weighted_pick(u, l.is_attack());
            builder.push(&format!("k{k}"));
        }
        columns.push(Column::Nominal(builder.finish()));
    }
    columns.push(Column::Label(labels));

    Dataset::from_columns(spec.schema(), columns)
}

fn weighted_pick(u: f64, attack: bool) -> usize {
    let mut acc = 0.0;
    for i in 0..NOMINAL_WEIGHTS.len() {
        let w = if attack {
            NOMINAL_WEIGHTS[i]
        } else {
            NOMINAL_WEIGHTS[NOMINAL_WEIGHTS.len() - 1 - i]
        };
        acc += w;
        if u < acc {
            return i;
        }
    }
    NOMINAL_WEIGHTS.len() - 1
}
