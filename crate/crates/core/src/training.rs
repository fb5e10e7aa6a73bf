//! Cost functions with the trace penalty, central finite-difference
//! gradients, ADAM, batching, and the epoch loop. All training here is
//! deterministic given the seed.

use crate::error::{Error, Result};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::time::Instant;

/// Task cost selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CostKind {
    Mse,
    Bce,
}

/// Cost configuration: task cost kind and trace-penalty weight η.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostSpec {
    pub kind: CostKind,
    pub eta: f64,
}

impl CostSpec {
    pub fn mse() -> Self {
        Self {
            kind: CostKind::Mse,
            eta: 10.0,
        }
    }

    pub fn bce() -> Self {
        Self {
            kind: CostKind::Bce,
            eta: 10.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.eta < 0.0 {
            return Err(Error::invalid("penalty weight eta must be nonnegative"));
        }
        Ok(())
    }
}

/// Mean square error per the network's output dimensionality:
/// `(1/m)·Σ_t ‖ỹ_t − y_t‖²` where m is the per-step output length.
pub fn mse_cost(pred: &[Vec<f64>], target: &[Vec<f64>]) -> Result<f64> {
    if pred.len() != target.len() {
        return Err(Error::DimensionMismatch {
            expected: target.len(),
            got: pred.len(),
        });
    }
    if pred.is_empty() {
        return Err(Error::invalid("mse of empty sequences"));
    }
    let m = target[0].len();
    if m == 0 {
        return Err(Error::invalid("mse of zero-dimensional outputs"));
    }
    let mut sum = 0.0;
    for (p, t) in pred.iter().zip(target) {
        if p.len() != m || t.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: p.len().max(t.len()),
            });
        }
        sum += p
            .iter()
            .zip(t)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>();
    }
    Ok(sum / m as f64)
}

const BCE_CLIP: f64 = 1e-7;

/// Binary cross entropy with predictions clipped into
/// `[BCE_CLIP, 1 − BCE_CLIP]`.
pub fn bce_cost(pred: &[f64], target: &[f64]) -> Result<f64> {
    if pred.len() != target.len() || pred.is_empty() {
        return Err(Error::invalid("bce needs equal nonempty lengths"));
    }
    let m = pred.len() as f64;
    let mut sum = 0.0;
    for (&p, &y) in pred.iter().zip(target) {
        let p = p.clamp(BCE_CLIP, 1.0 - BCE_CLIP);
        sum -= y * p.ln() + (1.0 - y) * (1.0 - p).ln();
    }
    Ok(sum / m)
}

/// Trace-leakage regularizer `η·(1 − Tr ρ)²`, with the trace taken after the
/// final layer of a sequence.
pub fn trace_penalty(trace: f64, eta: f64) -> f64 {
    eta * (1.0 - trace) * (1.0 - trace)
}

/// Central finite differences: `g_k = [f(p + h·e_k) − f(p − h·e_k)] / 2h`.
/// The two evaluations per coordinate may run on worker threads; the result
/// vector is assembled in index order.
pub fn fd_gradient<F>(loss_at: F, params: &[f64], h: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    if h <= 0.0 {
        return Err(Error::invalid("finite-difference step must be positive"));
    }
    (0..params.len())
        .into_par_iter()
        .map(|k| {
            let mut plus = params.to_vec();
            plus[k] += h;
            let mut minus = params.to_vec();
            minus[k] -= h;
            let fp = loss_at(&plus)?;
            let fm = loss_at(&minus)?;
            let g = (fp - fm) / (2.0 * h);
            if !g.is_finite() {
                return Err(Error::NumericalFailure { index: k });
            }
            Ok(g)
        })
        .collect()
}

/// ADAM optimizer state with the standard defaults.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdamState {
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub lr: f64,
}

impl AdamState {
    pub fn new(dim: usize, lr: f64) -> Self {
        Self {
            m: vec![0.0; dim],
            v: vec![0.0; dim],
            t: 0,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            lr,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.t
    }
}

/// One bias-corrected ADAM update. `bounds` clamps selected coordinates of
/// the updated parameters (the squeezing block, for the quantum model).
pub fn adam_update(
    state: &mut AdamState,
    params: &[f64],
    grad: &[f64],
    bounds: &[Option<(f64, f64)>],
) -> Result<Vec<f64>> {
    let n = params.len();
    if grad.len() != n || state.m.len() != n || bounds.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: grad.len(),
        });
    }
    state.t += 1;
    let b1t = 1.0 - state.beta1.powi(state.t as i32);
    let b2t = 1.0 - state.beta2.powi(state.t as i32);
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        state.m[k] = state.beta1 * state.m[k] + (1.0 - state.beta1) * grad[k];
        state.v[k] = state.beta2 * state.v[k] + (1.0 - state.beta2) * grad[k] * grad[k];
        let m_hat = state.m[k] / b1t;
        let v_hat = state.v[k] / b2t;
        let mut p = params[k] - state.lr * m_hat / (v_hat.sqrt() + state.eps);
        if let Some((lo, hi)) = bounds[k] {
            p = p.clamp(lo, hi);
        }
        out.push(p);
    }
    Ok(out)
}

/// Fraction of predictions on the correct side of 0.5 (`pred ≥ 0.5` reads as
/// class 1).
pub fn accuracy(preds: &[f64], labels: &[u8]) -> Result<f64> {
    if preds.is_empty() || preds.len() != labels.len() {
        return Err(Error::invalid("accuracy needs equal nonempty lengths"));
    }
    let hits = preds
        .iter()
        .zip(labels)
        .filter(|(&p, &y)| (p >= 0.5) == (y == 1))
        .count();
    Ok(hits as f64 / preds.len() as f64)
}

/// Training hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub lr: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub seed: u64,
    pub fd_step: f64,
    pub param_clamp: f64,
}

impl TrainConfig {
    pub fn new(lr: f64, epochs: usize, seed: u64) -> Self {
        Self {
            lr,
            batch_size: 7,
            epochs,
            seed,
            fd_step: 1e-4,
            param_clamp: crate::gates::DEFAULT_SQUEEZE_CLAMP,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.lr < 0.0 || !self.lr.is_finite() {
            return Err(Error::invalid("learning rate must be nonnegative"));
        }
        if self.batch_size < 1 {
            return Err(Error::invalid("batch size must be at least 1"));
        }
        if self.fd_step <= 0.0 {
            return Err(Error::invalid("fd_step must be positive"));
        }
        Ok(())
    }
}

/// Per-epoch record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochMetrics {
    pub epoch: usize,
    pub train_cost: f64,
    pub test_cost: f64,
    pub accuracy: Option<f64>,
    pub wall_seconds: f64,
}

/// Scalar model output plus the final trace for quantum models.
#[derive(Debug, Clone, Copy)]
pub struct Prediction {
    pub value: f64,
    pub trace: Option<f64>,
}

/// A model trainable by the shared finite-difference engine.
pub trait TrainableModel: Clone + Send + Sync {
    fn param_count(&self) -> usize;
    fn params(&self) -> Vec<f64>;
    fn set_params(&mut self, params: &[f64]) -> Result<()>;

    /// Scalar prediction (pre-squashing) for one input sequence.
    fn predict(&self, input: &[f64]) -> Result<Prediction>;

    /// Predictions for many sequences. Implementations override this when
    /// per-call setup (circuit composition) should be shared across items.
    fn predict_batch(&self, inputs: &[Vec<f64>]) -> Result<Vec<Prediction>> {
        inputs.iter().map(|w| self.predict(w)).collect()
    }

    /// Feedback forecast: process the input, then feed each output back for
    /// `horizon` further steps. Returns `horizon + 1` values starting with
    /// the base prediction.
    fn forecast(&self, input: &[f64], horizon: usize) -> Result<Vec<f64>>;

    /// Per-coordinate clamp bounds applied after each optimizer update.
    fn clamp_bounds(&self, clamp: f64) -> Vec<Option<(f64, f64)>> {
        let _ = clamp;
        vec![None; self.param_count()]
    }
}

/// Inputs and scalar targets, already windowed and split. For classification
/// the targets are 0/1 labels.
#[derive(Debug, Clone)]
pub struct TaskData {
    pub train_inputs: Vec<Vec<f64>>,
    pub train_targets: Vec<f64>,
    pub test_inputs: Vec<Vec<f64>>,
    pub test_targets: Vec<f64>,
}

impl TaskData {
    pub fn from_series(ds: &crate::datasets::SeriesDataset) -> Self {
        Self {
            train_inputs: ds.train_windows.iter().map(|w| w.input.clone()).collect(),
            train_targets: ds.train_windows.iter().map(|w| w.target).collect(),
            test_inputs: ds.test_windows.iter().map(|w| w.input.clone()).collect(),
            test_targets: ds.test_windows.iter().map(|w| w.target).collect(),
        }
    }

    pub fn from_images(ds: &crate::datasets::ImageDataset) -> Self {
        let (train_seq, train_lbl) = ds.train();
        let (test_seq, test_lbl) = ds.test();
        Self {
            train_inputs: train_seq.to_vec(),
            train_targets: train_lbl.iter().map(|&l| l as f64).collect(),
            test_inputs: test_seq.to_vec(),
            test_targets: test_lbl.iter().map(|&l| l as f64).collect(),
        }
    }
}

fn item_cost(kind: CostKind, prediction: f64, target: f64) -> f64 {
    match kind {
        CostKind::Mse => (prediction - target) * (prediction - target),
        CostKind::Bce => {
            let p = crate::qrnn::sigmoid(prediction).clamp(BCE_CLIP, 1.0 - BCE_CLIP);
            -(target * p.ln() + (1.0 - target) * (1.0 - p).ln())
        }
    }
}

/// Mean task cost over a set, optionally adding the mean trace penalty.
fn set_cost<M: TrainableModel>(
    model: &M,
    inputs: &[Vec<f64>],
    targets: &[f64],
    cost: &CostSpec,
    with_penalty: bool,
) -> Result<f64> {
    let preds = model.predict_batch(inputs)?;
    let n = preds.len() as f64;
    let mut task = 0.0;
    let mut penalty = 0.0;
    for (p, &t) in preds.iter().zip(targets) {
        task += item_cost(cost.kind, p.value, t);
        if let Some(tr) = p.trace {
            penalty += trace_penalty(tr, cost.eta);
        }
    }
    let mut total = task / n;
    if with_penalty {
        total += penalty / n;
    }
    Ok(total)
}

/// Test-set classification accuracy (sigmoid head, threshold 0.5).
pub fn classification_accuracy<M: TrainableModel>(
    model: &M,
    inputs: &[Vec<f64>],
    targets: &[f64],
) -> Result<f64> {
    let preds = model.predict_batch(inputs)?;
    let probs: Vec<f64> = preds
        .iter()
        .map(|p| crate::qrnn::sigmoid(p.value))
        .collect();
    let labels: Vec<u8> = targets.iter().map(|&t| if t >= 0.5 { 1 } else { 0 }).collect();
    accuracy(&probs, &labels)
}

/// The epoch loop: shuffle, batch, finite-difference gradient, ADAM update.
///
/// Each batch's loss is the mean task cost plus the mean trace penalty
/// (quantum models only; classical models report no trace). The recorded
/// test cost always excludes the penalty. A non-finite loss aborts the run
/// with the failing epoch in the error.
pub fn train<M: TrainableModel>(
    model: &mut M,
    data: &TaskData,
    cost: &CostSpec,
    cfg: &TrainConfig,
) -> Result<Vec<EpochMetrics>> {
    cfg.validate()?;
    cost.validate()?;
    if data.train_inputs.is_empty() {
        return Err(Error::invalid("training set is empty"));
    }

    let mut params = model.params();
    let mut adam = AdamState::new(params.len(), cfg.lr);
    let bounds = model.clamp_bounds(cfg.param_clamp);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut metrics = Vec::with_capacity(cfg.epochs);

    for epoch in 0..cfg.epochs {
        let started = Instant::now();
        let mut order: Vec<usize> = (0..data.train_inputs.len()).collect();
        order.shuffle(&mut rng);

        for batch in order.chunks(cfg.batch_size) {
            let batch_inputs: Vec<Vec<f64>> =
                batch.iter().map(|&i| data.train_inputs[i].clone()).collect();
            let batch_targets: Vec<f64> = batch.iter().map(|&i| data.train_targets[i]).collect();

            let base = model.clone();
            let loss_at = |p: &[f64]| -> Result<f64> {
                let mut candidate = base.clone();
                candidate.set_params(p)?;
                set_cost(&candidate, &batch_inputs, &batch_targets, cost, true)
            };
            let grad = fd_gradient(&loss_at, &params, cfg.fd_step).map_err(|e| match e {
                Error::NumericalFailure { index } => Error::NumericalInconsistency(format!(
                    "non-finite loss at epoch {epoch}, parameter {index}"
                )),
                other => other,
            })?;
            params = adam_update(&mut adam, &params, &grad, &bounds)?;
            model.set_params(&params)?;
        }

        let train_cost = set_cost(model, &data.train_inputs, &data.train_targets, cost, true)?;
        let test_cost = set_cost(model, &data.test_inputs, &data.test_targets, cost, false)?;
        if !train_cost.is_finite() || !test_cost.is_finite() {
            return Err(Error::NumericalInconsistency(format!(
                "non-finite cost at epoch {epoch}"
            )));
        }
        let acc = match cost.kind {
            CostKind::Bce => Some(classification_accuracy(
                model,
                &data.test_inputs,
                &data.test_targets,
            )?),
            CostKind::Mse => None,
        };
        metrics.push(EpochMetrics {
            epoch,
            train_cost,
            test_cost,
            accuracy: acc,
            wall_seconds: started.elapsed().as_secs_f64(),
        });
    }
    Ok(metrics)
}

/// Evaluate a model's cost on a set without training (used for the
/// repeat-last baseline and for reporting).
pub fn evaluate<M: TrainableModel>(
    model: &M,
    data: &TaskData,
    cost: &CostSpec,
) -> Result<(f64, f64)> {
    let train = set_cost(model, &data.train_inputs, &data.train_targets, cost, false)?;
    let test = set_cost(model, &data.test_inputs, &data.test_targets, cost, false)?;
    Ok((train, test))
}
