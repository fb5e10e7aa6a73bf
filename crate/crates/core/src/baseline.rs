//! Classical reference models: a from-scratch LSTM sized to match the
//! quantum model's trainable-parameter count, and the repeat-last predictor.
//! Both train through the same finite-difference engine as the quantum
//! model, so comparisons differ only in the model.

use crate::error::{Error, Result};
use crate::training::{Prediction, TrainableModel};
use ndarray::Array2;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Gate weights and biases of one LSTM cell plus the linear output head.
/// Each gate weight is `d × (d + input_dim)` acting on `[h; x]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LstmParams {
    pub hidden: usize,
    pub input_dim: usize,
    pub output_dim: usize,
    pub w_f: Array2<f64>,
    pub w_i: Array2<f64>,
    pub w_o: Array2<f64>,
    pub w_c: Array2<f64>,
    pub b_f: Vec<f64>,
    pub b_i: Vec<f64>,
    pub b_o: Vec<f64>,
    pub b_c: Vec<f64>,
    pub w_y: Array2<f64>,
    pub b_y: Vec<f64>,
}

/// Hidden and cell state.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmState {
    pub h: Vec<f64>,
    pub c: Vec<f64>,
}

impl LstmState {
    pub fn zeros(hidden: usize) -> Self {
        Self {
            h: vec![0.0; hidden],
            c: vec![0.0; hidden],
        }
    }
}

/// Total trainable parameters: `4d(d + input_dim + 1) + output_dim(d + 1)`.
pub fn lstm_param_count(hidden: usize, input_dim: usize, output_dim: usize) -> usize {
    4 * hidden * (hidden + input_dim + 1) + output_dim * (hidden + 1)
}

/// Smallest hidden size whose LSTM parameter count is at least
/// `quantum_param_count` (closest-from-above rule).
pub fn match_hidden_size(quantum_param_count: usize, input_dim: usize, output_dim: usize) -> usize {
    let mut d = 1;
    while lstm_param_count(d, input_dim, output_dim) < quantum_param_count {
        d += 1;
    }
    d
}

impl LstmParams {
    pub fn zeros(hidden: usize, input_dim: usize, output_dim: usize) -> Self {
        let gate = || Array2::zeros((hidden, hidden + input_dim));
        Self {
            hidden,
            input_dim,
            output_dim,
            w_f: gate(),
            w_i: gate(),
            w_o: gate(),
            w_c: gate(),
            b_f: vec![0.0; hidden],
            b_i: vec![0.0; hidden],
            b_o: vec![0.0; hidden],
            b_c: vec![0.0; hidden],
            w_y: Array2::zeros((output_dim, hidden)),
            b_y: vec![0.0; output_dim],
        }
    }

    /// Seeded init: weights uniform on (−0.5, 0.5) scaled by
    /// `1/√(d + input_dim)`, biases zero. Draws happen in flat-layout order.
    pub fn random_init(
        hidden: usize,
        input_dim: usize,
        output_dim: usize,
        rng: &mut impl Rng,
    ) -> Self {
        let scale = 1.0 / ((hidden + input_dim) as f64).sqrt();
        let mut p = Self::zeros(hidden, input_dim, output_dim);
        for w in [&mut p.w_f, &mut p.w_i, &mut p.w_o, &mut p.w_c] {
            for v in w.iter_mut() {
                *v = rng.gen_range(-0.5..0.5) * scale;
            }
        }
        for v in p.w_y.iter_mut() {
            *v = rng.gen_range(-0.5..0.5) * scale;
        }
        p
    }

    pub fn param_count(&self) -> usize {
        lstm_param_count(self.hidden, self.input_dim, self.output_dim)
    }

    /// Flat layout: `[W_f | W_i | W_o | W_c (row-major) | b_f | b_i | b_o |
    /// b_c | W_y | b_y]`.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.param_count());
        for w in [&self.w_f, &self.w_i, &self.w_o, &self.w_c] {
            v.extend(w.iter().copied());
        }
        for b in [&self.b_f, &self.b_i, &self.b_o, &self.b_c] {
            v.extend_from_slice(b);
        }
        v.extend(self.w_y.iter().copied());
        v.extend_from_slice(&self.b_y);
        v
    }

    pub fn from_flat(
        hidden: usize,
        input_dim: usize,
        output_dim: usize,
        flat: &[f64],
    ) -> Result<Self> {
        let expected = lstm_param_count(hidden, input_dim, output_dim);
        if flat.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: flat.len(),
            });
        }
        let mut p = Self::zeros(hidden, input_dim, output_dim);
        let mut pos = 0;
        let gate_len = hidden * (hidden + input_dim);
        for w in [&mut p.w_f, &mut p.w_i, &mut p.w_o, &mut p.w_c] {
            *w = Array2::from_shape_vec(
                (hidden, hidden + input_dim),
                flat[pos..pos + gate_len].to_vec(),
            )
            .expect("shape consistent");
            pos += gate_len;
        }
        for b in [&mut p.b_f, &mut p.b_i, &mut p.b_o, &mut p.b_c] {
            b.copy_from_slice(&flat[pos..pos + hidden]);
            pos += hidden;
        }
        let y_len = output_dim * hidden;
        p.w_y = Array2::from_shape_vec((output_dim, hidden), flat[pos..pos + y_len].to_vec())
            .expect("shape consistent");
        pos += y_len;
        p.b_y.copy_from_slice(&flat[pos..pos + output_dim]);
        Ok(p)
    }
}

fn sigmoid(v: f64) -> f64 {
    1.0 / (1.0 + (-v).exp())
}

fn gate(w: &Array2<f64>, b: &[f64], h: &[f64], x: &[f64], squash: fn(f64) -> f64) -> Vec<f64> {
    let d = b.len();
    let mut out = Vec::with_capacity(d);
    for row in 0..d {
        let mut acc = b[row];
        for (j, &hv) in h.iter().enumerate() {
            acc += w[(row, j)] * hv;
        }
        for (j, &xv) in x.iter().enumerate() {
            acc += w[(row, h.len() + j)] * xv;
        }
        out.push(squash(acc));
    }
    out
}

/// Standard LSTM cell update on `[h; x]`.
pub fn lstm_step(state: &LstmState, x: &[f64], params: &LstmParams) -> Result<LstmState> {
    if x.len() != params.input_dim || state.h.len() != params.hidden {
        return Err(Error::DimensionMismatch {
            expected: params.input_dim,
            got: x.len(),
        });
    }
    let f = gate(&params.w_f, &params.b_f, &state.h, x, sigmoid);
    let i = gate(&params.w_i, &params.b_i, &state.h, x, sigmoid);
    let o = gate(&params.w_o, &params.b_o, &state.h, x, sigmoid);
    let c_tilde = gate(&params.w_c, &params.b_c, &state.h, x, f64::tanh);
    let mut c = Vec::with_capacity(params.hidden);
    let mut h = Vec::with_capacity(params.hidden);
    for k in 0..params.hidden {
        let ck = f[k] * state.c[k] + i[k] * c_tilde[k];
        c.push(ck);
        h.push(o[k] * ck.tanh());
    }
    Ok(LstmState { h, c })
}

fn output_head(params: &LstmParams, h: &[f64]) -> Vec<f64> {
    let mut y = Vec::with_capacity(params.output_dim);
    for row in 0..params.output_dim {
        let mut acc = params.b_y[row];
        for (j, &hv) in h.iter().enumerate() {
            acc += params.w_y[(row, j)] * hv;
        }
        y.push(acc);
    }
    y
}

/// Iterate the cell over the inputs from a zero state; the first output is
/// the linear head after the last input, and each further output feeds back
/// as the next input (carrying hidden and cell state). Returns
/// `horizon + 1` output vectors.
pub fn lstm_forward(
    inputs: &[Vec<f64>],
    params: &LstmParams,
    horizon: usize,
) -> Result<Vec<Vec<f64>>> {
    if inputs.is_empty() {
        return Err(Error::invalid("lstm_forward requires nonempty inputs"));
    }
    let mut state = LstmState::zeros(params.hidden);
    for x in inputs {
        state = lstm_step(&state, x, params)?;
    }
    let mut outputs = Vec::with_capacity(horizon + 1);
    let mut y = output_head(params, &state.h);
    outputs.push(y.clone());
    for _ in 0..horizon {
        if y.len() != params.input_dim {
            return Err(Error::invalid(
                "feedback requires output_dim == input_dim",
            ));
        }
        state = lstm_step(&state, &y, params)?;
        y = output_head(params, &state.h);
        outputs.push(y.clone());
    }
    Ok(outputs)
}

/// LSTM wrapped for the shared training engine (scalar in, scalar out).
#[derive(Debug, Clone)]
pub struct LstmModel {
    pub params: LstmParams,
}

impl LstmModel {
    /// Hidden size matched from above to a quantum parameter count.
    pub fn matched_to(quantum_param_count: usize, rng: &mut impl Rng) -> Self {
        let d = match_hidden_size(quantum_param_count, 1, 1);
        Self {
            params: LstmParams::random_init(d, 1, 1, rng),
        }
    }
}

impl TrainableModel for LstmModel {
    fn param_count(&self) -> usize {
        self.params.param_count()
    }

    fn params(&self) -> Vec<f64> {
        self.params.to_flat()
    }

    fn set_params(&mut self, params: &[f64]) -> Result<()> {
        self.params = LstmParams::from_flat(
            self.params.hidden,
            self.params.input_dim,
            self.params.output_dim,
            params,
        )?;
        Ok(())
    }

    fn predict(&self, input: &[f64]) -> Result<Prediction> {
        let seq: Vec<Vec<f64>> = input.iter().map(|&v| vec![v]).collect();
        let out = lstm_forward(&seq, &self.params, 0)?;
        Ok(Prediction {
            value: out[0][0],
            trace: None,
        })
    }

    fn forecast(&self, input: &[f64], horizon: usize) -> Result<Vec<f64>> {
        let seq: Vec<Vec<f64>> = input.iter().map(|&v| vec![v]).collect();
        let out = lstm_forward(&seq, &self.params, horizon)?;
        Ok(out.into_iter().map(|v| v[0]).collect())
    }
}

/// The no-parameter baseline: predict the window's final value; forecasting
/// continues it as a constant.
#[derive(Debug, Clone, Default)]
pub struct RepeatLastModel;

impl TrainableModel for RepeatLastModel {
    fn param_count(&self) -> usize {
        0
    }

    fn params(&self) -> Vec<f64> {
        Vec::new()
    }

    fn set_params(&mut self, params: &[f64]) -> Result<()> {
        if params.is_empty() {
            Ok(())
        } else {
            Err(Error::invalid("repeat-last has no parameters"))
        }
    }

    fn predict(&self, input: &[f64]) -> Result<Prediction> {
        Ok(Prediction {
            value: crate::datasets::repeat_last_baseline(input)?,
            trace: None,
        })
    }

    fn forecast(&self, input: &[f64], horizon: usize) -> Result<Vec<f64>> {
        let last = crate::datasets::repeat_last_baseline(input)?;
        Ok(vec![last; horizon + 1])
    }
}
