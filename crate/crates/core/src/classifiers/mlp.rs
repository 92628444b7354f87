use ndarray::{Array1, Array2, Axis};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::numeric::{matching_matrix, numeric_matrix, NumericMatrix};
use crate::dataset::{Dataset, Label};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpParams {
    pub hidden: usize,
    pub max_epochs: usize,
    pub batch: usize,
    pub learning_rate: f64,
    /// Stop when the epoch loss fails to improve by more than this for
    /// `patience` consecutive epochs.
    pub tolerance: f64,
    pub patience: usize,
    pub seed: u64,
}

impl Default for MlpParams {
    fn default() -> Self {
        MlpParams {
            hidden: 100,
            max_epochs: 200,
            batch: 200,
            learning_rate: 1e-3,
            tolerance: 1e-4,
            patience: 10,
            seed: 0,
        }
    }
}

const ADAM_BETA1: f64 = 0.9;
const ADAM_BETA2: f64 = 0.999;
const ADAM_EPSILON: f64 = 1e-8;

/// One rectifier hidden layer feeding a single logistic output unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpNet {
    /// Input-to-hidden weights, `d x h`.
    pub w1: Array2<f64>,
    pub b1: Array1<f64>,
    /// Hidden-to-output weights, `h`.
    pub w2: Array1<f64>,
    pub b2: f64,
}

/// Gradient of the mean cross-entropy loss, same shapes as [`MlpNet`].
#[derive(Debug, Clone, PartialEq)]
pub struct MlpGradient {
    pub w1: Array2<f64>,
    pub b1: Array1<f64>,
    pub w2: Array1<f64>,
    pub b2: f64,
}

impl MlpNet {
    /// Glorot-uniform weights, zero biases, seeded.
    pub fn init(inputs: usize, hidden: usize, seed: u64) -> MlpNet {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bound1 = (6.0 / (inputs + hidden) as f64).sqrt();
        let w1 = Array2::from_shape_fn((inputs, hidden), |_| rng.random_range(-bound1..bound1));
        let bound2 = (6.0 / (hidden + 1) as f64).sqrt();
        let w2 = Array1::from_shape_fn(hidden, |_| rng.random_range(-bound2..bound2));
        MlpNet {
            w1,
            b1: Array1::zeros(hidden),
            w2,
            b2: 0.0,
        }
    }

    /// Logit (pre-sigmoid output) per row of `x`.
    pub fn logits(&self, x: &Array2<f64>) -> Array1<f64> {
        let hidden = (x.dot(&self.w1) + &self.b1).mapv(|v| v.max(0.0));
        hidden.dot(&self.w2) + self.b2
    }

    /// Mean binary cross-entropy of the batch, computed from logits in a
    /// numerically stable form.
    pub fn loss(&self, x: &Array2<f64>, y: &[f64]) -> f64 {
        let z = self.logits(x);
        let total: f64 = z
            .iter()
            .zip(y)
            .map(|(&z, &y)| z.max(0.0) - y * z + (-z.abs()).exp().ln_1p())
            .sum();
        total / y.len() as f64
    }

    /// Exact analytic gradient of the mean cross-entropy loss over a
    /// non-empty batch, together with the loss itself.
    pub fn gradient(&self, x: &Array2<f64>, y: &[f64]) -> (f64, MlpGradient) {
        assert!(!y.is_empty(), "gradient needs a non-empty batch");
        assert_eq!(x.nrows(), y.len());
        let b = y.len() as f64;

        let pre = x.dot(&self.w1) + &self.b1;
        let hidden = pre.mapv(|v| v.max(0.0));
        let z = hidden.dot(&self.w2) + self.b2;
        let p = z.mapv(sigmoid);

        let loss = z
            .iter()
            .zip(y)
            .map(|(&z, &y)| z.max(0.0) - y * z + (-z.abs()).exp().ln_1p())
            .sum::<f64>()
            / b;

        // d(loss)/dz per row, already carrying the 1/batch factor.
        let dz = Array1::from_iter(p.iter().zip(y).map(|(&p, &y)| (p - y) / b));
        let gw2 = hidden.t().dot(&dz);
        let gb2 = dz.sum();
        let mut dh = dz
            .view()
            .insert_axis(Axis(1))
            .broadcast((y.len(), self.w2.len()))
            .expect("broadcast (b,1) to (b,h)")
            .to_owned();
        dh = dh * &self.w2;
        let dpre = dh * pre.mapv(|v| if v > 0.0 { 1.0 } else { 0.0 });
        let gw1 = x.t().dot(&dpre);
        let gb1 = dpre.sum_axis(Axis(0));

        (
            loss,
            MlpGradient {
                w1: gw1,
                b1: gb1,
                w2: gw2,
                b2: gb2,
            },
        )
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

struct AdamState {
    m_w1: Array2<f64>,
    v_w1: Array2<f64>,
    m_b1: Array1<f64>,
    v_b1: Array1<f64>,
    m_w2: Array1<f64>,
    v_w2: Array1<f64>,
    m_b2: f64,
    v_b2: f64,
    step: i32,
}

impl AdamState {
    fn new(inputs: usize, hidden: usize) -> AdamState {
        AdamState {
            m_w1: Array2::zeros((inputs, hidden)),
            v_w1: Array2::zeros((inputs, hidden)),
            m_b1: Array1::zeros(hidden),
            v_b1: Array1::zeros(hidden),
            m_w2: Array1::zeros(hidden),
            v_w2: Array1::zeros(hidden),
            m_b2: 0.0,
            v_b2: 0.0,
            step: 0,
        }
    }

    fn update(&mut self, net: &mut MlpNet, grad: &MlpGradient, lr: f64) {
        self.step += 1;
        let bias1 = 1.0 - ADAM_BETA1.powi(self.step);
        let bias2 = 1.0 - ADAM_BETA2.powi(self.step);
        let scale = lr * bias2.sqrt() / bias1;

        fn step_scalar(m: &mut f64, v: &mut f64, g: f64, scale: f64, x: &mut f64) {
            *m = ADAM_BETA1 * *m + (1.0 - ADAM_BETA1) * g;
            *v = ADAM_BETA2 * *v + (1.0 - ADAM_BETA2) * g * g;
            *x -= scale * *m / (v.sqrt() + ADAM_EPSILON);
        }

        for ((m, v), (g, x)) in self
            .m_w1
            .iter_mut()
            .zip(self.v_w1.iter_mut())
            .zip(grad.w1.iter().zip(net.w1.iter_mut()))
        {
            step_scalar(m, v, *g, scale, x);
        }
        for ((m, v), (g, x)) in self
            .m_b1
            .iter_mut()
            .zip(self.v_b1.iter_mut())
            .zip(grad.b1.iter().zip(net.b1.iter_mut()))
        {
            step_scalar(m, v, *g, scale, x);
        }
        for ((m, v), (g, x)) in self
            .m_w2
            .iter_mut()
            .zip(self.v_w2.iter_mut())
            .zip(grad.w2.iter().zip(net.w2.iter_mut()))
        {
            step_scalar(m, v, *g, scale, x);
        }
        step_scalar(&mut self.m_b2, &mut self.v_b2, grad.b2, scale, &mut net.b2);
    }
}

/// Single-hidden-layer perceptron trained with mini-batch Adam on
/// cross-entropy loss.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    cols: Vec<String>,
    net: MlpNet,
    pub epochs_run: usize,
    pub final_loss: f64,
}

impl MlpModel {
    pub fn fit(train: &Dataset, params: &MlpParams) -> Result<MlpModel> {
        validate_params(params)?;
        if train.row_count() == 0 {
            return Err(Error::EmptyDataset);
        }
        let (matrix, labels) = numeric_matrix(train, "mlp")?;
        let y: Vec<f64> = labels.iter().map(|l| l.as_bit() as f64).collect();
        let x = to_array(&matrix);

        let mut net = MlpNet::init(matrix.width(), params.hidden, params.seed);
        let mut adam = AdamState::new(matrix.width(), params.hidden);
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed.wrapping_add(1));
        let mut order: Vec<usize> = (0..matrix.rows).collect();

        let mut best_loss = f64::INFINITY;
        let mut no_improvement = 0usize;
        let mut epochs_run = 0;
        let mut final_loss = f64::INFINITY;

        for _ in 0..params.max_epochs {
            order.shuffle(&mut rng);
            let mut epoch_loss = 0.0;
            for chunk in order.chunks(params.batch) {
                let xb = Array2::from_shape_fn((chunk.len(), matrix.width()), |(i, j)| {
                    x[(chunk[i], j)]
                });
                let yb: Vec<f64> = chunk.iter().map(|&i| y[i]).collect();
                let (loss, grad) = net.gradient(&xb, &yb);
                adam.update(&mut net, &grad, params.learning_rate);
                epoch_loss += loss * chunk.len() as f64;
            }
            epoch_loss /= matrix.rows as f64;
            epochs_run += 1;
            final_loss = epoch_loss;

            if epoch_loss < best_loss - params.tolerance {
                no_improvement = 0;
            } else {
                no_improvement += 1;
                if no_improvement >= params.patience {
                    break;
                }
            }
            best_loss = best_loss.min(epoch_loss);
        }

        Ok(MlpModel {
            cols: matrix.cols,
            net,
            epochs_run,
            final_loss,
        })
    }

    pub fn predict(&self, d: &Dataset) -> Result<Vec<Label>> {
        Ok(self
            .logits(d)?
            .into_iter()
            .map(|z| if z >= 0.0 { Label::Attack } else { Label::Normal })
            .collect())
    }

    /// Pre-sigmoid output per row; positive means more attack-like.
    pub fn logits(&self, d: &Dataset) -> Result<Vec<f64>> {
        let matrix = matching_matrix(d, &self.cols, "mlp")?;
        let x = to_array(&matrix);
        Ok(self.net.logits(&x).to_vec())
    }

    pub fn net(&self) -> &MlpNet {
        &self.net
    }
}

fn validate_params(params: &MlpParams) -> Result<()> {
    if params.hidden < 1 {
        return Err(Error::invalid_param("hidden", "must be at least 1"));
    }
    if params.batch < 1 {
        return Err(Error::invalid_param("batch", "must be at least 1"));
    }
    if params.learning_rate <= 0.0 {
        return Err(Error::invalid_param("learning_rate", "must be positive"));
    }
    Ok(())
}

fn to_array(matrix: &NumericMatrix) -> Array2<f64> {
    Array2::from_shape_vec((matrix.rows, matrix.width()), matrix.data.clone())
        .expect("row-major matrix dimensions agree")
}
