use serde::{Deserialize, Serialize};

use super::numeric::{matching_matrix, numeric_matrix};
use crate::dataset::{Dataset, Label};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GnbParams {
    /// Variance floor as a fraction of the largest per-feature variance.
    pub var_smoothing: f64,
}

impl Default for GnbParams {
    fn default() -> Self {
        GnbParams {
            var_smoothing: 1e-9,
        }
    }
}

/// Gaussian naive Bayes with per-class feature means and variances and
/// empirical class priors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GnbModel {
    cols: Vec<String>,
    log_priors: [f64; 2],
    means: [Vec<f64>; 2],
    variances: [Vec<f64>; 2],
}

const LN_2PI: f64 = 1.8378770664093453;

impl GnbModel {
    pub fn fit(train: &Dataset, params: &GnbParams) -> Result<GnbModel> {
        if params.var_smoothing <= 0.0 {
            return Err(Error::invalid_param("var_smoothing", "must be positive"));
        }
        if train.row_count() == 0 {
            return Err(Error::EmptyDataset);
        }
        let (matrix, labels) = numeric_matrix(train, "gnb")?;
        let width = matrix.width();
        let n = matrix.rows;

        // Smoothing scale: largest feature variance over the whole set.
        let mut overall_mean = vec![0.0; width];
        for r in 0..n {
            for (m, &x) in overall_mean.iter_mut().zip(matrix.row(r)) {
                *m += x;
            }
        }
        overall_mean.iter_mut().for_each(|m| *m /= n as f64);
        let mut overall_var = vec![0.0; width];
        for r in 0..n {
            for ((v, &mean), &x) in overall_var
                .iter_mut()
                .zip(&overall_mean)
                .zip(matrix.row(r))
            {
                *v += (x - mean) * (x - mean);
            }
        }
        overall_var.iter_mut().for_each(|v| *v /= n as f64);
        let max_var = overall_var.iter().cloned().fold(0.0, f64::max);
        let epsilon = if max_var > 0.0 {
            params.var_smoothing * max_var
        } else {
            params.var_smoothing
        };

        let mut counts = [0usize; 2];
        let mut means = [vec![0.0; width], vec![0.0; width]];
        for (r, l) in labels.iter().enumerate() {
            let c = l.as_bit() as usize;
            counts[c] += 1;
            for (m, &x) in means[c].iter_mut().zip(matrix.row(r)) {
                *m += x;
            }
        }
        for c in 0..2 {
            if counts[c] > 0 {
                means[c].iter_mut().for_each(|m| *m /= counts[c] as f64);
            }
        }
        let mut variances = [vec![0.0; width], vec![0.0; width]];
        for (r, l) in labels.iter().enumerate() {
            let c = l.as_bit() as usize;
            for ((v, &mean), &x) in variances[c].iter_mut().zip(&means[c]).zip(matrix.row(r)) {
                *v += (x - mean) * (x - mean);
            }
        }
        for c in 0..2 {
            for v in variances[c].iter_mut() {
                if counts[c] > 0 {
                    *v = *v / counts[c] as f64 + epsilon;
                } else {
                    *v = epsilon;
                }
            }
        }

        let log_priors = [
            if counts[0] == 0 {
                f64::NEG_INFINITY
            } else {
                (counts[0] as f64 / n as f64).ln()
            },
            if counts[1] == 0 {
                f64::NEG_INFINITY
            } else {
                (counts[1] as f64 / n as f64).ln()
            },
        ];
        Ok(GnbModel {
            cols: matrix.cols,
            log_priors,
            means,
            variances,
        })
    }

    fn joint_log_likelihood(&self, row: &[f64]) -> [f64; 2] {
        let mut ll = [0.0f64; 2];
        for c in 0..2 {
            if self.log_priors[c] == f64::NEG_INFINITY {
                ll[c] = f64::NEG_INFINITY;
                continue;
            }
            let mut acc = self.log_priors[c];
            for ((&x, &mean), &var) in row.iter().zip(&self.means[c]).zip(&self.variances[c]) {
                let d = x - mean;
                acc -= 0.5 * (LN_2PI + var.ln() + d * d / var);
            }
            ll[c] = acc;
        }
        ll
    }

    pub fn predict(&self, d: &Dataset) -> Result<Vec<Label>> {
        Ok(self
            .log_posterior_differences(d)?
            .into_iter()
            .map(|s| if s >= 0.0 { Label::Attack } else { Label::Normal })
            .collect())
    }

    /// Log-posterior difference `log P(attack|x) - log P(normal|x)` per row.
    pub fn log_posterior_differences(&self, d: &Dataset) -> Result<Vec<f64>> {
        let matrix = matching_matrix(d, &self.cols, "gnb")?;
        Ok((0..matrix.rows)
            .map(|r| {
                let ll = self.joint_log_likelihood(matrix.row(r));
                if ll[1] == f64::NEG_INFINITY && ll[0] == f64::NEG_INFINITY {
                    0.0
                } else if ll[1] == f64::NEG_INFINITY {
                    f64::NEG_INFINITY
                } else if ll[0] == f64::NEG_INFINITY {
                    f64::INFINITY
                } else {
                    ll[1] - ll[0]
                }
            })
            .collect())
    }

    /// Normalized class posteriors per row.
    pub fn posteriors(&self, d: &Dataset) -> Result<Vec<[f64; 2]>> {
        let matrix = matching_matrix(d, &self.cols, "gnb")?;
        Ok((0..matrix.rows)
            .map(|r| {
                let ll = self.joint_log_likelihood(matrix.row(r));
                let max = ll[0].max(ll[1]);
                let e0 = (ll[0] - max).exp();
                let e1 = (ll[1] - max).exp();
                [e0 / (e0 + e1), e1 / (e0 + e1)]
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{Column, ColumnKind, Schema};

    fn one_feature(values: &[f64], bits: &[u8]) -> Dataset {
        let schema = Schema::new(vec![
            ("x".into(), ColumnKind::Numeric),
            ("label".into(), ColumnKind::Label),
        ])
        .unwrap();
        Dataset::from_columns(
            schema,
            vec![
                Column::Numeric(values.to_vec()),
                Column::Label(bits.iter().map(|&b| Label::from_bit(b).unwrap()).collect()),
            ],
        )
        .unwrap()
    }

    #[test]
    fn all_attack_training_predicts_attack_everywhere() {
        let train = one_feature(&[1.0, 2.0, 3.0], &[1, 1, 1]);
        let model = GnbModel::fit(&train, &GnbParams::default()).unwrap();
        let probe = one_feature(&[-100.0, 0.0, 100.0], &[0, 0, 0]);
        assert_eq!(
            model.predict(&probe).unwrap(),
            vec![Label::Attack, Label::Attack, Label::Attack]
        );
    }

    #[test]
    fn symmetric_likelihoods_let_the_prior_decide() {
        // Class-conditionals are mirror images around 0; priors are 68/32.
        // At the midpoint the likelihoods cancel and the prior wins.
        let mut values = Vec::new();
        let mut bits = Vec::new();
        for i in 0..68 {
            values.push(if i % 2 == 0 { 1.1 } else { 0.9 });
            bits.push(1);
        }
        for i in 0..32 {
            values.push(if i % 2 == 0 { -1.1 } else { -0.9 });
            bits.push(0);
        }
        let train = one_feature(&values, &bits);
        let model = GnbModel::fit(&train, &GnbParams::default()).unwrap();

        // Independent posterior computation at the equidistant query x=0.
        let attack: Vec<f64> = values[..68].to_vec();
        let normal: Vec<f64> = values[68..].to_vec();
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let var = |v: &[f64], m: f64| v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / v.len() as f64;
        let (ma, mn) = (mean(&attack), mean(&normal));
        assert!((ma + mn).abs() < 1e-12, "means mirror");
        assert!((var(&attack, ma) - var(&normal, mn)).abs() < 1e-12, "variances equal");
        // log-likelihoods equal at 0, so the posterior ratio is exactly the
        // prior ratio 0.68/0.32 > 1.
        let query = one_feature(&[0.0], &[0]);
        assert_eq!(model.predict(&query).unwrap(), vec![Label::Attack]);
        let diff = model.log_posterior_differences(&query).unwrap()[0];
        let expected = (0.68f64 / 0.32).ln();
        assert!((diff - expected).abs() < 1e-9, "diff {diff} vs {expected}");
    }

    #[test]
    fn posteriors_sum_to_one() {
        let train = one_feature(&[0.0, 0.3, 0.7, 1.0, 2.0, 2.5, 3.0, 3.3], &[0, 0, 0, 0, 1, 1, 1, 1]);
        let model = GnbModel::fit(&train, &GnbParams::default()).unwrap();
        for p in model.posteriors(&train).unwrap() {
            assert!((p[0] + p[1] - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn score_sign_agrees_with_predict() {
        let train = one_feature(&[0.0, 0.4, 1.6, 2.0, 0.2, 1.8], &[0, 0, 1, 1, 0, 1]);
        let model = GnbModel::fit(&train, &GnbParams::default()).unwrap();
        let scores = model.log_posterior_differences(&train).unwrap();
        let pred = model.predict(&train).unwrap();
        for (s, p) in scores.iter().zip(&pred) {
            assert_eq!(*s >= 0.0, p.is_attack());
        }
    }

    #[test]
    fn constant_feature_gets_smoothed_variance_not_nan() {
        let train = one_feature(&[5.0, 5.0, 5.0, 5.0], &[0, 0, 1, 1]);
        let model = GnbModel::fit(&train, &GnbParams::default()).unwrap();
        let scores = model.log_posterior_differences(&train).unwrap();
        assert!(scores.iter().all(|s| s.is_finite()));
    }
}
