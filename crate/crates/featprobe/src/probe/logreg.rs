//! Multiclass logistic regression trained with minibatch SGD and
//! classical momentum.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::tensorio::FeatureMatrix;

/// Training hyperparameters. Parameters start at zero (the objective is
/// convex), so the seed only drives the per-epoch batch shuffle.
#[derive(Debug, Clone, Copy)]
pub struct LogRegConfig {
    pub learning_rate: f64,
    pub momentum: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for LogRegConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.01,
            momentum: 0.9,
            epochs: 100,
            batch_size: 64,
            seed: 0,
        }
    }
}

/// A trained softmax classifier.
#[derive(Debug, Clone)]
pub struct LogRegModel {
    weights: DMatrix<f64>, // classes x p
    bias: DVector<f64>,
    epoch_losses: Vec<f64>,
}

impl LogRegModel {
    pub fn n_classes(&self) -> usize {
        self.weights.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.weights.ncols()
    }

    pub fn weights(&self) -> &DMatrix<f64> {
        &self.weights
    }

    pub fn bias(&self) -> &DVector<f64> {
        &self.bias
    }

    /// Mean training loss after each epoch.
    pub fn epoch_losses(&self) -> &[f64] {
        &self.epoch_losses
    }

    /// Class logits for one feature row.
    pub fn logits(&self, row: &[f64]) -> Vec<f64> {
        (0..self.n_classes())
            .map(|k| {
                self.weights
                    .row(k)
                    .iter()
                    .zip(row)
                    .map(|(w, x)| w * x)
                    .sum::<f64>()
                    + self.bias[k]
            })
            .collect()
    }

    /// Argmax prediction; ties break toward the lowest class index.
    pub fn predict(&self, row: &[f64]) -> usize {
        let logits = self.logits(row);
        let mut best = 0;
        for (k, &v) in logits.iter().enumerate().skip(1) {
            if v > logits[best] {
                best = k;
            }
        }
        best
    }
}

/// Mean cross-entropy of softmax predictions and its gradient over the
/// given examples, at parameters `(weights, bias)`.
pub fn loss_and_gradient(
    weights: &DMatrix<f64>,
    bias: &DVector<f64>,
    x: &DMatrix<f64>,
    y: &[usize],
) -> (f64, DMatrix<f64>, DVector<f64>) {
    let n = x.nrows();
    let k = weights.nrows();
    // logits: n x k
    let mut probs = x * weights.transpose();
    let mut loss = 0.0;
    for (i, &label) in y.iter().enumerate() {
        for c in 0..k {
            probs[(i, c)] += bias[c];
        }
        let row_max = (0..k).map(|c| probs[(i, c)]).fold(f64::NEG_INFINITY, f64::max);
        let mut denom = 0.0;
        for c in 0..k {
            let e = (probs[(i, c)] - row_max).exp();
            probs[(i, c)] = e;
            denom += e;
        }
        for c in 0..k {
            probs[(i, c)] /= denom;
        }
        loss -= probs[(i, label)].max(f64::MIN_POSITIVE).ln();
    }
    loss /= n as f64;

    // dL/dlogits = (p - onehot) / n
    for (i, &label) in y.iter().enumerate() {
        probs[(i, label)] -= 1.0;
    }
    probs /= n as f64;
    let grad_w = probs.transpose() * x;
    let grad_b = DVector::from_fn(k, |c, _| probs.column(c).sum());
    (loss, grad_w, grad_b)
}

/// Trains by minibatch SGD with classical momentum
/// (`v <- m*v - lr*g; theta <- theta + v`), reshuffling the data each
/// epoch with the seeded generator.
pub fn train_logreg(
    x: &FeatureMatrix,
    y: &[usize],
    n_classes: usize,
    cfg: &LogRegConfig,
) -> Result<LogRegModel> {
    if x.rows() != y.len() {
        return Err(Error::BadDecode(format!(
            "{} feature rows for {} labels",
            x.rows(),
            y.len()
        )));
    }
    if n_classes < 2 {
        return Err(Error::BadDecode("need at least 2 classes".into()));
    }
    if let Some(&bad) = y.iter().find(|&&c| c >= n_classes) {
        return Err(Error::BadDecode(format!(
            "label {bad} out of range for {n_classes} classes"
        )));
    }

    let n = x.rows();
    let p = x.cols();
    let xd = x.to_dmatrix();
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);

    let mut weights = DMatrix::zeros(n_classes, p);
    let mut bias = DVector::zeros(n_classes);
    let mut vel_w = DMatrix::zeros(n_classes, p);
    let mut vel_b = DVector::zeros(n_classes);
    let mut order: Vec<usize> = (0..n).collect();
    let mut epoch_losses = Vec::with_capacity(cfg.epochs);

    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        let mut seen = 0usize;
        for batch in order.chunks(cfg.batch_size.max(1)) {
            let xb = DMatrix::from_fn(batch.len(), p, |r, c| xd[(batch[r], c)]);
            let yb: Vec<usize> = batch.iter().map(|&i| y[i]).collect();
            let (loss, grad_w, grad_b) = loss_and_gradient(&weights, &bias, &xb, &yb);
            if !loss.is_finite() {
                return Err(Error::Divergence { epoch });
            }
            epoch_loss += loss * batch.len() as f64;
            seen += batch.len();

            vel_w = &vel_w * cfg.momentum - &grad_w * cfg.learning_rate;
            vel_b = &vel_b * cfg.momentum - &grad_b * cfg.learning_rate;
            weights += &vel_w;
            bias += &vel_b;
        }
        epoch_losses.push(epoch_loss / seen as f64);
    }

    Ok(LogRegModel {
        weights,
        bias,
        epoch_losses,
    })
}

/// Evaluation result of one classifier on one split.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierEval {
    pub accuracy: f64,
    /// `confusion[true][predicted]` counts.
    pub confusion: Vec<Vec<usize>>,
}

/// Argmax evaluation with a confusion matrix.
pub fn eval_classifier(
    model: &LogRegModel,
    x: &FeatureMatrix,
    y: &[usize],
) -> Result<ClassifierEval> {
    if x.cols() != model.n_features() {
        return Err(Error::BadDecode(format!(
            "model expects {} features, matrix has {}",
            model.n_features(),
            x.cols()
        )));
    }
    if x.rows() != y.len() {
        return Err(Error::BadDecode("row/label count mismatch".into()));
    }
    let k = model.n_classes();
    let mut confusion = vec![vec![0usize; k]; k];
    let mut correct = 0usize;
    for (r, &label) in y.iter().enumerate() {
        let pred = model.predict(x.row(r));
        confusion[label][pred] += 1;
        if pred == label {
            correct += 1;
        }
    }
    Ok(ClassifierEval {
        accuracy: correct as f64 / y.len().max(1) as f64,
        confusion,
    })
}
