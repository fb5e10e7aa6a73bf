//! The CV-QRNN cell and recurrence: encode, evolve, measure the quadrature
//! means, rescale, reset, iterate. Prediction, forecasting, and
//! classification heads.
//!
//! Modes `0..n1` are register modes carried between time steps; modes
//! `n1..n1+n2` are input modes that are encoded, measured, and reset each
//! step. The measurement model is the deterministic expectation `⟨x̂⟩` (no
//! shot sampling), so forward passes are pure functions of their inputs.

use crate::channels::{loss_channel, LossSpec};
use crate::error::{Error, Result};
use crate::fock::{
    embed, expectation, partial_trace, quadrature_x, tensor_with_vacuum, DensityState,
    ModeSelection,
};
use crate::gates::{displacement_cached, layer_trainable_unitary, LayerParams};
use crate::linalg::{ComplexMatrix, C_ZERO};
use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Shape of one CV-QRNN: register/input mode counts, truncation, window and
/// forecast lengths, and the scale applied to inputs before displacement
/// encoding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QRNNConfig {
    /// Register modes carried between steps.
    pub n1: usize,
    /// Input modes encoded, measured, and reset each step.
    pub n2: usize,
    /// Fock levels per mode.
    pub cutoff: usize,
    /// Input window length T.
    pub window: usize,
    /// Forecast length T_y.
    pub forecast_len: usize,
    /// Multiplier applied to inputs before displacement encoding.
    pub encoding_scale: f64,
}

impl QRNNConfig {
    pub fn new(n1: usize, n2: usize, cutoff: usize, window: usize) -> Result<Self> {
        let cfg = Self {
            n1,
            n2,
            cutoff,
            window,
            forecast_len: 0,
            encoding_scale: 1.0,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n1 < 1 || self.n2 < 1 {
            return Err(Error::invalid("n1 and n2 must be at least 1"));
        }
        if self.cutoff < 3 {
            return Err(Error::invalid("cutoff must be at least 3"));
        }
        if self.window < 2 {
            return Err(Error::invalid("window T must be at least 2"));
        }
        Ok(())
    }

    pub fn n_modes(&self) -> usize {
        self.n1 + self.n2
    }

    /// Full Hilbert-space dimension `D^(n1+n2)`.
    pub fn dim(&self) -> usize {
        self.cutoff.pow(self.n_modes() as u32)
    }

    /// Input-mode positions (the highest indices).
    pub fn input_modes(&self) -> Vec<usize> {
        (self.n1..self.n_modes()).collect()
    }
}

/// Everything one recurrence step produces.
#[derive(Debug, Clone)]
pub struct StepOutput {
    /// `⟨x̂⟩` per input mode.
    pub measured: Vec<f64>,
    /// `γ · measured`, elementwise.
    pub rescaled: Vec<f64>,
    /// Register modes joined with fresh vacuum input modes.
    pub post_state: DensityState,
    /// `Tr ρ` after the layer (before reset), feeding the trace penalty.
    pub trace_after: f64,
}

/// Displacement-encode a classical vector onto the (fresh vacuum) input
/// modes: `D(encoding_scale·x_k)` on input mode `k`.
pub fn encode(state: &DensityState, x: &[f64], config: &QRNNConfig) -> Result<DensityState> {
    if x.len() != config.n2 {
        return Err(Error::DimensionMismatch {
            expected: config.n2,
            got: x.len(),
        });
    }
    let n = config.n_modes();
    let cutoff = config.cutoff;
    let mut out = state.clone();
    for (k, &xk) in x.iter().enumerate() {
        let alpha = Complex64::new(config.encoding_scale * xk, 0.0);
        let gate = displacement_cached(alpha, cutoff)?;
        let sel = ModeSelection::single(config.n1 + k, n)?;
        let full = embed(&gate, &sel, n, cutoff)?;
        out = crate::fock::apply_unitary(&out, &full)?;
    }
    Ok(out)
}

/// Measurement guard: `|⟨x̂⟩|` can never exceed the spectral bound of the
/// truncated quadrature, which is below `2√D`.
fn check_measured(measured: f64, cutoff: usize) -> Result<f64> {
    if !measured.is_finite() || measured.abs() > 2.0 * (cutoff as f64).sqrt() {
        return Err(Error::NumericalInconsistency(format!(
            "quadrature mean {measured} outside the truncated spectral bound"
        )));
    }
    Ok(measured)
}

/// One recurrence step on a full (n1+n2)-mode state: encode, apply the layer
/// unitary (and the loss channel, when configured), measure `⟨x̂⟩` on the
/// input modes, record the trace, then reset the input modes to vacuum.
///
/// This is the reference embed-path implementation; [`QrnnCell`] computes the
/// same map on the register block only.
pub fn step(
    state: &DensityState,
    x: &[f64],
    params: &LayerParams,
    config: &QRNNConfig,
) -> Result<StepOutput> {
    step_with_loss(state, x, params, config, None)
}

pub fn step_with_loss(
    state: &DensityState,
    x: &[f64],
    params: &LayerParams,
    config: &QRNNConfig,
    loss: Option<&LossSpec>,
) -> Result<StepOutput> {
    let n = config.n_modes();
    if state.n_modes() != n || state.cutoff() != config.cutoff {
        return Err(Error::invalid("state shape does not match config"));
    }
    let encoded = encode(state, x, config)?;
    let u = layer_trainable_unitary(params, config.cutoff)?;
    let mut evolved = crate::fock::apply_unitary(&encoded, &u)?;
    if let Some(spec) = loss {
        evolved = loss_channel(&evolved, spec)?;
    }

    let xq = quadrature_x(config.cutoff)?;
    let mut measured = Vec::with_capacity(config.n2);
    for k in 0..config.n2 {
        let sel = ModeSelection::single(config.n1 + k, n)?;
        let obs = embed(&xq, &sel, n, config.cutoff)?;
        measured.push(check_measured(expectation(&evolved, &obs)?, config.cutoff)?);
    }
    let trace_after = evolved.trace();

    let input_sel = ModeSelection::new(config.input_modes(), n)?;
    let register = partial_trace(&evolved, &input_sel)?;
    let post_state = tensor_with_vacuum(&register, config.n2, &input_sel)?;

    let rescaled = measured.iter().map(|m| params.gamma * m).collect();
    Ok(StepOutput {
        measured,
        rescaled,
        post_state,
        trace_after,
    })
}

/// Compiled recurrence cell: the layer unitary is composed once and the
/// recursion is carried on the register block `ρ_reg` only.
///
/// Per step, with `c` the coherent input vector and `W = U·(I_reg ⊗ c)`, the
/// new register state is `Σ_k W_k ρ_reg W_k†` (k runs over input-block Fock
/// labels), which is evaluated as two dense products. Equal to the embed
/// path within 1e-12.
pub struct QrnnCell {
    config: QRNNConfig,
    gamma: f64,
    u: ComplexMatrix,
    loss: Option<LossSpec>,
    /// x̂ embedded in the input block (dimension D^n2), one per input mode.
    x_obs: Vec<ComplexMatrix>,
    /// Single-mode displacement columns are assembled per step from this
    /// cached vacuum column index.
    params: LayerParams,
    rho_reg: ComplexMatrix,
}

impl QrnnCell {
    pub fn new(params: &LayerParams, config: &QRNNConfig, loss: Option<LossSpec>) -> Result<Self> {
        config.validate()?;
        if params.n_modes() != config.n_modes() {
            return Err(Error::DimensionMismatch {
                expected: config.n_modes(),
                got: params.n_modes(),
            });
        }
        if let Some(spec) = &loss {
            if spec.applied_modes().indices().iter().any(|&m| m >= config.n_modes()) {
                return Err(Error::invalid("loss channel mode out of range"));
            }
        }
        let u = layer_trainable_unitary(params, config.cutoff)?;
        let xq = quadrature_x(config.cutoff)?;
        let mut x_obs = Vec::with_capacity(config.n2);
        for k in 0..config.n2 {
            let sel = ModeSelection::single(k, config.n2)?;
            x_obs.push(embed(&xq, &sel, config.n2, config.cutoff)?);
        }
        let dim_reg = config.cutoff.pow(config.n1 as u32);
        let mut rho_reg = Array2::from_elem((dim_reg, dim_reg), C_ZERO);
        rho_reg[(0, 0)] = crate::linalg::C_ONE;
        Ok(Self {
            config: config.clone(),
            gamma: params.gamma,
            u,
            loss,
            x_obs,
            params: params.clone(),
            rho_reg,
        })
    }

    /// Reset the register to vacuum.
    pub fn reset(&mut self) {
        self.rho_reg.fill(C_ZERO);
        self.rho_reg[(0, 0)] = crate::linalg::C_ONE;
    }

    pub fn config(&self) -> &QRNNConfig {
        &self.config
    }

    /// Current register state as a density state over `n1` modes.
    pub fn register_state(&self) -> DensityState {
        DensityState::from_parts_unchecked(self.config.n1, self.config.cutoff, self.rho_reg.clone())
    }

    /// Coherent input-block column: `⊗_k D(s·x_k)|0⟩`.
    fn input_column(&self, x: &[f64]) -> Result<Vec<Complex64>> {
        let d = self.config.cutoff;
        let mut col = vec![crate::linalg::C_ONE];
        for &xk in x {
            let alpha = Complex64::new(self.config.encoding_scale * xk, 0.0);
            let gate = displacement_cached(alpha, d)?;
            let mut next = vec![C_ZERO; col.len() * d];
            for (i, &ci) in col.iter().enumerate() {
                for m in 0..d {
                    next[i * d + m] = ci * gate[(m, 0)];
                }
            }
            col = next;
        }
        Ok(col)
    }

    /// Advance one step; returns (measured, trace_after).
    pub fn step(&mut self, x: &[f64]) -> Result<(Vec<f64>, f64)> {
        if x.len() != self.config.n2 {
            return Err(Error::DimensionMismatch {
                expected: self.config.n2,
                got: x.len(),
            });
        }
        if self.loss.is_some() {
            return self.step_dense(x);
        }
        let d_in = self.config.cutoff.pow(self.config.n2 as u32);
        let dim_reg = self.rho_reg.nrows();
        let dim = d_in * dim_reg;
        let c = self.input_column(x)?;

        // W = U · (I_reg ⊗ c), a dim × dim_reg matrix
        let u_flat = self.u.as_slice().expect("standard layout");
        let mut w = Array2::from_elem((dim, dim_reg), C_ZERO);
        {
            let w_flat = w.as_slice_mut().expect("standard layout");
            for row in 0..dim {
                let u_row = &u_flat[row * dim..(row + 1) * dim];
                let w_row = &mut w_flat[row * dim_reg..(row + 1) * dim_reg];
                for m in 0..dim_reg {
                    let mut acc = C_ZERO;
                    for (k, &ck) in c.iter().enumerate() {
                        acc += u_row[m * d_in + k] * ck;
                    }
                    w_row[m] = acc;
                }
            }
        }

        // Y = W · ρ_reg ; ρ'_reg = Ỹ · W̃† over the combined (input, reg-in) index
        let y = w.dot(&self.rho_reg);
        let y_wide = y
            .view()
            .into_shape_with_order((dim_reg, d_in * dim_reg))
            .expect("contiguous");
        let w_wide = w
            .view()
            .into_shape_with_order((dim_reg, d_in * dim_reg))
            .expect("contiguous");
        let w_wide_h = w_wide.mapv(|z| z.conj()).reversed_axes();
        let rho_next = y_wide.dot(&w_wide_h);

        // trace after the layer = Tr ρ'_reg (partial trace preserves it)
        let trace_after = rho_next.diag().iter().map(|z| z.re).sum::<f64>();

        // ⟨x̂⟩ on input mode j: Σ_r Σ_{k',k} X_j[k',k] · Σ_m Y[(r,k),m]·W*[(r,k'),m]
        let y_flat = y.as_slice().expect("standard layout");
        let w_flat = w.as_slice().expect("standard layout");
        let mut measured = Vec::with_capacity(self.config.n2);
        for obs in &self.x_obs {
            let mut acc = C_ZERO;
            for kp in 0..d_in {
                for k in 0..d_in {
                    let o = obs[(kp, k)];
                    if o == C_ZERO {
                        continue;
                    }
                    let mut inner = C_ZERO;
                    for r in 0..dim_reg {
                        let y_row = &y_flat[(r * d_in + k) * dim_reg..(r * d_in + k + 1) * dim_reg];
                        let w_row =
                            &w_flat[(r * d_in + kp) * dim_reg..(r * d_in + kp + 1) * dim_reg];
                        for (yv, wv) in y_row.iter().zip(w_row) {
                            inner += yv * wv.conj();
                        }
                    }
                    acc += o * inner;
                }
            }
            if acc.im.abs() > 1e-9 {
                return Err(Error::NumericalInconsistency(format!(
                    "quadrature mean has imaginary residue {:.3e}",
                    acc.im
                )));
            }
            measured.push(check_measured(acc.re, self.config.cutoff)?);
        }

        self.rho_reg = rho_next;
        Ok((measured, trace_after))
    }

    /// Dense step used when a loss channel is configured: materializes the
    /// full state, applies the Kraus maps, then reduces back.
    fn step_dense(&mut self, x: &[f64]) -> Result<(Vec<f64>, f64)> {
        let cfg = &self.config;
        let n = cfg.n_modes();
        let full = DensityState::from_parts_unchecked(
            cfg.n1,
            cfg.cutoff,
            self.rho_reg.clone(),
        );
        let input_sel = ModeSelection::new(cfg.input_modes(), n)?;
        let full = tensor_with_vacuum(&full, cfg.n2, &input_sel)?;
        let encoded = encode(&full, x, cfg)?;
        let mut evolved = crate::fock::apply_unitary(&encoded, &self.u)?;
        if let Some(spec) = &self.loss {
            evolved = loss_channel(&evolved, spec)?;
        }
        let xq = quadrature_x(cfg.cutoff)?;
        let mut measured = Vec::with_capacity(cfg.n2);
        for k in 0..cfg.n2 {
            let sel = ModeSelection::single(cfg.n1 + k, n)?;
            let obs = embed(&xq, &sel, n, cfg.cutoff)?;
            measured.push(check_measured(expectation(&evolved, &obs)?, cfg.cutoff)?);
        }
        let trace_after = evolved.trace();
        let register = partial_trace(&evolved, &input_sel)?;
        self.rho_reg = register.rho().clone();
        Ok((measured, trace_after))
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn params(&self) -> &LayerParams {
        &self.params
    }
}

/// Iterate the layer over an input sequence starting from all-vacuum.
/// Returns the per-step rescaled outputs `γ·⟨x̂⟩` and per-step traces. The
/// first prediction ỹ₀ is the final step's rescaled output.
pub fn run_sequence(
    inputs: &[Vec<f64>],
    params: &LayerParams,
    config: &QRNNConfig,
) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    run_sequence_with_loss(inputs, params, config, None)
}

pub fn run_sequence_with_loss(
    inputs: &[Vec<f64>],
    params: &LayerParams,
    config: &QRNNConfig,
    loss: Option<LossSpec>,
) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    if inputs.is_empty() {
        return Err(Error::invalid("input sequence must be nonempty"));
    }
    let mut cell = QrnnCell::new(params, config, loss)?;
    let mut outputs = Vec::with_capacity(inputs.len());
    let mut traces = Vec::with_capacity(inputs.len());
    for x in inputs {
        let (measured, trace) = cell.step(x)?;
        outputs.push(measured.iter().map(|m| cell.gamma() * m).collect());
        traces.push(trace);
    }
    Ok((outputs, traces))
}

/// Process the inputs, then feed each rescaled output back as the next input
/// for `horizon` further steps, carrying the register state forward.
/// Returns `[ỹ₀, ỹ₁, …, ỹ_horizon]` (length `horizon + 1`).
pub fn forecast(
    inputs: &[Vec<f64>],
    params: &LayerParams,
    config: &QRNNConfig,
    horizon: usize,
) -> Result<Vec<Vec<f64>>> {
    forecast_with_loss(inputs, params, config, horizon, None)
}

pub fn forecast_with_loss(
    inputs: &[Vec<f64>],
    params: &LayerParams,
    config: &QRNNConfig,
    horizon: usize,
    loss: Option<LossSpec>,
) -> Result<Vec<Vec<f64>>> {
    if inputs.is_empty() {
        return Err(Error::invalid("input sequence must be nonempty"));
    }
    let mut cell = QrnnCell::new(params, config, loss)?;
    let mut last = Vec::new();
    for x in inputs {
        let (measured, _) = cell.step(x)?;
        last = measured.iter().map(|m| cell.gamma() * m).collect();
    }
    let mut out = Vec::with_capacity(horizon + 1);
    out.push(last.clone());
    for _ in 0..horizon {
        let (measured, _) = cell.step(&last)?;
        last = measured.iter().map(|m| cell.gamma() * m).collect();
        out.push(last.clone());
    }
    Ok(out)
}

/// Logistic squashing of the scalar network output.
pub fn sigmoid(v: f64) -> f64 {
    1.0 / (1.0 + (-v).exp())
}

/// Classification head: run the pixel sequence, squash the first input
/// mode's final rescaled output through a sigmoid. Output lies in (0, 1).
pub fn classify(pixel_sequence: &[f64], params: &LayerParams, config: &QRNNConfig) -> Result<f64> {
    if pixel_sequence.is_empty() {
        return Err(Error::invalid("pixel sequence must be nonempty"));
    }
    let inputs: Vec<Vec<f64>> = pixel_sequence
        .iter()
        .map(|&p| {
            let mut v = vec![0.0; config.n2];
            v[0] = p;
            v
        })
        .collect();
    let (outputs, _) = run_sequence(&inputs, params, config)?;
    Ok(sigmoid(outputs.last().expect("nonempty")[0]))
}

fn scalar_to_input_vec(value: f64, n2: usize) -> Vec<f64> {
    let mut v = vec![0.0; n2];
    v[0] = value;
    v
}

/// The CV-QRNN wrapped for the shared training engine. Scalar sequences feed
/// the first input mode; the scalar prediction is the first input mode's
/// rescaled output after the final step.
#[derive(Debug, Clone)]
pub struct QrnnModel {
    pub params: LayerParams,
    pub config: QRNNConfig,
    pub loss: Option<LossSpec>,
}

impl QrnnModel {
    pub fn new(params: LayerParams, config: QRNNConfig) -> Result<Self> {
        config.validate()?;
        if params.n_modes() != config.n_modes() {
            return Err(Error::DimensionMismatch {
                expected: config.n_modes(),
                got: params.n_modes(),
            });
        }
        Ok(Self {
            params,
            config,
            loss: None,
        })
    }

    pub fn with_loss(mut self, loss: Option<LossSpec>) -> Self {
        self.loss = loss;
        self
    }

    /// Seeded random initialization per the shipped init distribution.
    pub fn random_init(config: QRNNConfig, rng: &mut impl rand::Rng) -> Result<Self> {
        config.validate()?;
        let params = LayerParams::random_init(config.n_modes(), rng);
        Ok(Self {
            params,
            config,
            loss: None,
        })
    }

    fn run_scalar_sequence(&self, cell: &mut QrnnCell, input: &[f64]) -> Result<crate::training::Prediction> {
        cell.reset();
        let mut last = 0.0;
        let mut trace = 1.0;
        for &v in input {
            let x = scalar_to_input_vec(v, self.config.n2);
            let (measured, tr) = cell.step(&x)?;
            last = self.params.gamma * measured[0];
            trace = tr;
        }
        Ok(crate::training::Prediction {
            value: last,
            trace: Some(trace),
        })
    }
}

impl crate::training::TrainableModel for QrnnModel {
    fn param_count(&self) -> usize {
        LayerParams::param_count(self.config.n_modes())
    }

    fn params(&self) -> Vec<f64> {
        self.params.to_flat()
    }

    fn set_params(&mut self, params: &[f64]) -> Result<()> {
        self.params = LayerParams::from_flat(self.config.n_modes(), params)?;
        Ok(())
    }

    fn predict(&self, input: &[f64]) -> Result<crate::training::Prediction> {
        let mut cell = QrnnCell::new(&self.params, &self.config, self.loss.clone())?;
        self.run_scalar_sequence(&mut cell, input)
    }

    /// The layer unitary is composed once and shared across all sequences.
    fn predict_batch(&self, inputs: &[Vec<f64>]) -> Result<Vec<crate::training::Prediction>> {
        let mut cell = QrnnCell::new(&self.params, &self.config, self.loss.clone())?;
        inputs
            .iter()
            .map(|input| self.run_scalar_sequence(&mut cell, input))
            .collect()
    }

    fn forecast(&self, input: &[f64], horizon: usize) -> Result<Vec<f64>> {
        let inputs: Vec<Vec<f64>> = input
            .iter()
            .map(|&v| scalar_to_input_vec(v, self.config.n2))
            .collect();
        let out = forecast_with_loss(&inputs, &self.params, &self.config, horizon, self.loss.clone())?;
        Ok(out.into_iter().map(|v| v[0]).collect())
    }

    /// Only the squeezing block is clamped.
    fn clamp_bounds(&self, clamp: f64) -> Vec<Option<(f64, f64)>> {
        let n = self.config.n_modes();
        let mut bounds = vec![None; LayerParams::param_count(n)];
        for k in LayerParams::squeeze_flat_range(n) {
            bounds[k] = Some((-clamp, clamp));
        }
        bounds
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> QRNNConfig {
        QRNNConfig::new(1, 1, 4, 2).unwrap()
    }

    #[test]
    fn zero_params_zero_input_gives_vacuum_and_zero_output() {
        let cfg = small_config();
        let params = LayerParams::zeros(2);
        let state = DensityState::vacuum(2, 4);
        let out = step(&state, &[0.0], &params, &cfg).unwrap();
        assert_eq!(out.measured, vec![0.0]);
        assert_eq!(out.rescaled, vec![0.0]);
        assert!((out.trace_after - 1.0).abs() < 1e-12);
        let vac = DensityState::vacuum(2, 4);
        assert!(crate::linalg::max_abs(&(out.post_state.rho() - vac.rho())) < 1e-12);
    }

    #[test]
    fn encode_zero_leaves_state_unchanged() {
        let cfg = small_config();
        let st = DensityState::fock_state(&[1, 0], 4).unwrap();
        let out = encode(&st, &[0.0], &cfg).unwrap();
        assert!(crate::linalg::max_abs(&(out.rho() - st.rho())) < 1e-13);
    }

    #[test]
    fn encode_checks_length() {
        let cfg = small_config();
        let st = DensityState::vacuum(2, 4);
        assert!(encode(&st, &[0.1, 0.2], &cfg).is_err());
    }

    #[test]
    fn single_zero_input_sequence_gives_zero_output() {
        let cfg = small_config();
        let params = LayerParams::zeros(2);
        let (outputs, traces) = run_sequence(&[vec![0.0]], &params, &cfg).unwrap();
        assert_eq!(outputs, vec![vec![0.0]]);
        assert!((traces[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn outputs_scale_exactly_linearly_in_gamma() {
        let cfg = small_config();
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(3);
        let mut params = LayerParams::random_init(2, &mut rng);
        params.gamma = 0.7;
        let inputs = vec![vec![0.2], vec![-0.1], vec![0.3]];
        let (out1, _) = run_sequence(&inputs, &params, &cfg).unwrap();
        let mut doubled = params.clone();
        doubled.gamma = 1.4;
        let (out2, _) = run_sequence(&inputs, &params_with_gamma(&params, 1.4), &cfg).unwrap();
        let _ = doubled;
        for (a, b) in out1.iter().zip(&out2) {
            for (x, y) in a.iter().zip(b) {
                assert!((2.0 * x - y).abs() < 1e-12);
            }
        }
    }

    fn params_with_gamma(p: &LayerParams, gamma: f64) -> LayerParams {
        let mut q = p.clone();
        q.gamma = gamma;
        q
    }

    #[test]
    fn forecast_zero_params_is_all_zero() {
        let cfg = small_config();
        let params = LayerParams::zeros(2);
        let out = forecast(&[vec![0.3], vec![0.1]], &params, &cfg, 3).unwrap();
        assert_eq!(out.len(), 4);
        for v in out {
            assert_eq!(v, vec![0.0]);
        }
    }

    #[test]
    fn classify_zero_params_gives_half() {
        let cfg = small_config();
        let params = LayerParams::zeros(2);
        let pixels = vec![0.5; 9];
        let p = classify(&pixels, &params, &cfg).unwrap();
        assert!((p - 0.5).abs() < 1e-12);
    }

    #[test]
    fn classify_output_strictly_inside_unit_interval() {
        let cfg = small_config();
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(11);
        let params = LayerParams::random_init(2, &mut rng);
        let pixels: Vec<f64> = (0..9).map(|i| (i as f64) / 9.0).collect();
        let p = classify(&pixels, &params, &cfg).unwrap();
        assert!(p > 0.0 && p < 1.0);
    }

    #[test]
    fn config_validation() {
        assert!(QRNNConfig::new(0, 1, 4, 2).is_err());
        assert!(QRNNConfig::new(1, 0, 4, 2).is_err());
        assert!(QRNNConfig::new(1, 1, 2, 2).is_err());
        assert!(QRNNConfig::new(1, 1, 4, 1).is_err());
    }
}
