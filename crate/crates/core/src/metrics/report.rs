use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::confusion::{confusion, ConfusionMatrix};
use crate::classifiers::{ClassifierKind, ClassifierSpec, TrainedModel};
use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// One cell of the benchmark grid: a classifier evaluated on one feature
/// set, with its confusion counts, derived rates, and model building time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub classifier: ClassifierKind,
    /// Feature-set tag: `full`, `wrapper`, or a custom name.
    pub feature_tag: String,
    pub confusion: ConfusionMatrix,
    pub acc: Option<f64>,
    pub dr: Option<f64>,
    pub far: Option<f64>,
    /// Wall-clock seconds for fit plus predict (median over runs).
    pub mbt_seconds: f64,
    /// Every timed run, in execution order.
    pub mbt_runs: Vec<f64>,
    pub note: String,
    pub environment: String,
}

impl EvalReport {
    pub fn from_counts(
        classifier: ClassifierKind,
        feature_tag: &str,
        matrix: ConfusionMatrix,
    ) -> EvalReport {
        EvalReport {
            classifier,
            feature_tag: feature_tag.to_string(),
            confusion: matrix,
            acc: matrix.accuracy(),
            dr: matrix.detection_rate(),
            far: matrix.false_alert_rate(),
            mbt_seconds: 0.0,
            mbt_runs: Vec::new(),
            note: String::new(),
            environment: environment_note(),
        }
    }
}

pub(crate) fn environment_note() -> String {
    format!(
        "idsbench {} / {} threads",
        env!("CARGO_PKG_VERSION"),
        rayon::current_num_threads()
    )
}

/// Train per spec and score the test set, timing fit plus predict only (no
/// I/O, no preprocessing, no feature selection). With `repeats > 1` the runs
/// execute back to back and the reported time is their median; predictions
/// are identical across runs for seeded specs, so metrics come from the
/// first run.
pub fn time_fit_eval(
    spec: &ClassifierSpec,
    train: &Dataset,
    test: &Dataset,
    repeats: usize,
) -> Result<EvalReport> {
    if repeats < 1 {
        return Err(Error::invalid_param("repeats", "must be at least 1"));
    }
    let mut runs = Vec::with_capacity(repeats);
    let mut predictions = None;
    for _ in 0..repeats {
        let started = Instant::now();
        let model = TrainedModel::fit(spec, train)?;
        let pred = model.predict(test)?;
        runs.push(started.elapsed().as_secs_f64());
        predictions.get_or_insert(pred);
    }
    let pred = predictions.expect("at least one run");
    let matrix = confusion(&pred, test.labels())?;

    let mut sorted = runs.clone();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];

    let mut report = EvalReport::from_counts(spec.kind(), "custom", matrix);
    report.mbt_seconds = median;
    report.mbt_runs = runs;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::GnbParams;
    use crate::dataset::{generate_synthetic, SynthSpec};

    fn split_pair() -> (Dataset, Dataset) {
        let spec = SynthSpec {
            rows: 150,
            informative_numeric: 2,
            noise_numeric: 1,
            nominal_features: 0,
            class_balance: 0.5,
        };
        (
            generate_synthetic(&spec, 1).unwrap(),
            generate_synthetic(&spec, 2).unwrap(),
        )
    }

    #[test]
    fn timing_wraps_fit_and_predict_and_metrics_are_consistent() {
        let (train, test) = split_pair();
        let spec = ClassifierSpec::Gnb(GnbParams::default());
        let report = time_fit_eval(&spec, &train, &test, 1).unwrap();
        assert!(report.mbt_seconds > 0.0);
        assert_eq!(report.mbt_runs.len(), 1);

        let model = TrainedModel::fit(&spec, &train).unwrap();
        let matrix = confusion(&model.predict(&test).unwrap(), test.labels()).unwrap();
        assert_eq!(report.confusion, matrix);
        assert_eq!(report.acc, matrix.accuracy());
        assert_eq!(report.dr, matrix.detection_rate());
        assert_eq!(report.far, matrix.false_alert_rate());
    }

    #[test]
    fn median_of_three_runs() {
        let (train, test) = split_pair();
        let spec = ClassifierSpec::Gnb(GnbParams::default());
        let report = time_fit_eval(&spec, &train, &test, 3).unwrap();
        assert_eq!(report.mbt_runs.len(), 3);
        let mut sorted = report.mbt_runs.clone();
        sorted.sort_by(f64::total_cmp);
        assert_eq!(report.mbt_seconds, sorted[1]);
        assert!(time_fit_eval(&spec, &train, &test, 0).is_err());
    }

    #[test]
    fn report_json_round_trip_preserves_metric_values() {
        let (train, test) = split_pair();
        let spec = ClassifierSpec::Gnb(GnbParams::default());
        let report = time_fit_eval(&spec, &train, &test, 1).unwrap();
        let json = serde_json::to_string(&report).unwrap();
        let back: EvalReport = serde_json::from_str(&json).unwrap();
        assert_eq!(report, back);
    }
}
