use serde::{Deserialize, Serialize};

use crate::dataset::Label;
use crate::error::{Error, Result};

/// Binary confusion counts with attack as the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub true_positives: u64,
    pub true_negatives: u64,
    pub false_positives: u64,
    pub false_negatives: u64,
}

impl ConfusionMatrix {
    pub fn new(tp: u64, tn: u64, fp: u64, fn_: u64) -> ConfusionMatrix {
        ConfusionMatrix {
            true_positives: tp,
            true_negatives: tn,
            false_positives: fp,
            false_negatives: fn_,
        }
    }

    pub fn total(&self) -> u64 {
        self.true_positives + self.true_negatives + self.false_positives + self.false_negatives
    }

    /// `(TP + TN) / (TP + TN + FP + FN)`; None when no rows were scored.
    pub fn accuracy(&self) -> Option<f64> {
        let total = self.total();
        if total == 0 {
            return None;
        }
        Some((self.true_positives + self.true_negatives) as f64 / total as f64)
    }

    /// `TP / (TP + FN)`; None (undefined, never 0) when no attacks exist.
    pub fn detection_rate(&self) -> Option<f64> {
        let attacks = self.true_positives + self.false_negatives;
        if attacks == 0 {
            return None;
        }
        Some(self.true_positives as f64 / attacks as f64)
    }

    /// `FP / (FP + TN)`; None (undefined, never 0) when no normals exist.
    pub fn false_alert_rate(&self) -> Option<f64> {
        let normals = self.false_positives + self.true_negatives;
        if normals == 0 {
            return None;
        }
        Some(self.false_positives as f64 / normals as f64)
    }
}

/// Count confusion cells of a prediction against the truth. Arrays must be
/// non-empty and equal length.
pub fn confusion(pred: &[Label], truth: &[Label]) -> Result<ConfusionMatrix> {
    if pred.len() != truth.len() {
        return Err(Error::LengthMismatch {
            left: pred.len(),
            right: truth.len(),
        });
    }
    if pred.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut m = ConfusionMatrix::new(0, 0, 0, 0);
    for (&p, &t) in pred.iter().zip(truth) {
        match (p.is_attack(), t.is_attack()) {
            (true, true) => m.true_positives += 1,
            (false, false) => m.true_negatives += 1,
            (true, false) => m.false_positives += 1,
            (false, true) => m.false_negatives += 1,
        }
    }
    Ok(m)
}

/// Render a fraction as a percentage with two decimals, the tables' format.
/// Values are stored as fractions; rounding happens only here.
pub fn percent(fraction: f64) -> String {
    format!("{:.2}", fraction * 100.0)
}

/// Render an optional rate, printing `undefined` for missing denominators.
pub fn percent_or_undefined(rate: Option<f64>) -> String {
    match rate {
        Some(f) => percent(f),
        None => "undefined".to_string(),
    }
}
