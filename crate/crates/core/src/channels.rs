//! Noise models: the photon-loss channel on qumodes and additive uniform
//! noise on classical data.

use crate::error::{Error, Result};
use crate::fock::{
    annihilation, embedded_mul_left, embedded_mul_right, DensityState, ModeSelection,
};
use crate::linalg::{adjoint, identity, ComplexMatrix, C_ZERO};
use ndarray::Array2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Pure-loss channel with loss parameter β (energy transitivity 1 − β),
/// applied after the layer unitary on the selected modes.
#[derive(Debug, Clone)]
pub struct LossSpec {
    beta: f64,
    applied_modes: ModeSelection,
}

impl LossSpec {
    pub fn new(beta: f64, applied_modes: ModeSelection) -> Result<Self> {
        if !(0.0..=1.0).contains(&beta) {
            return Err(Error::invalid(format!("loss beta {beta} outside [0, 1]")));
        }
        Ok(Self {
            beta,
            applied_modes,
        })
    }

    /// Loss on every mode of an `n_modes` circuit.
    pub fn all_modes(beta: f64, n_modes: usize) -> Result<Self> {
        Self::new(beta, ModeSelection::new((0..n_modes).collect(), n_modes)?)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn applied_modes(&self) -> &ModeSelection {
        &self.applied_modes
    }
}

/// Additive uniform noise on a data sequence, `Uniform(−ε, ε)` per element.
#[derive(Debug, Clone)]
pub struct DataNoiseSpec {
    pub epsilon: f64,
    pub seed: u64,
}

impl DataNoiseSpec {
    pub fn new(epsilon: f64, seed: u64) -> Result<Self> {
        if !(epsilon >= 0.0) {
            return Err(Error::invalid("epsilon must be nonnegative"));
        }
        Ok(Self { epsilon, seed })
    }
}

fn kraus_cache() -> &'static Mutex<HashMap<(u64, usize), Arc<Vec<ComplexMatrix>>>> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, usize), Arc<Vec<ComplexMatrix>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Kraus operators of the single-mode pure-loss channel at the given cutoff:
/// `E_k = √(β^k / k!) · (1−β)^{n̂/2} · â^k` for `k = 0…D−1`.
pub fn kraus_operators(beta: f64, cutoff: usize) -> Result<Arc<Vec<ComplexMatrix>>> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::invalid(format!("loss beta {beta} outside [0, 1]")));
    }
    let key = (beta.to_bits(), cutoff);
    {
        let cache = kraus_cache().lock().unwrap();
        if let Some(v) = cache.get(&key) {
            return Ok(Arc::clone(v));
        }
    }

    let a = annihilation(cutoff)?;
    // (1-β)^{n̂/2} with the 0^0 = 1 convention so β = 1 maps onto vacuum
    let mut damp = Array2::from_elem((cutoff, cutoff), C_ZERO);
    for m in 0..cutoff {
        let v = if m == 0 {
            1.0
        } else {
            (1.0 - beta).powf(m as f64 / 2.0)
        };
        damp[(m, m)] = Complex64::new(v, 0.0);
    }

    let mut ops = Vec::with_capacity(cutoff);
    let mut a_pow = identity(cutoff);
    let mut log_weight = 0.0f64; // ln(β^k / k!)
    for k in 0..cutoff {
        if k > 0 {
            a_pow = a.dot(&a_pow);
            log_weight += beta.ln() - (k as f64).ln();
        }
        let w = if k == 0 {
            1.0
        } else if beta == 0.0 {
            0.0
        } else {
            (0.5 * log_weight).exp()
        };
        let e_k = damp.dot(&a_pow).mapv(|z| z * w);
        ops.push(e_k);
    }

    let arc = Arc::new(ops);
    let mut cache = kraus_cache().lock().unwrap();
    cache.insert(key, Arc::clone(&arc));
    Ok(arc)
}

/// Apply the pure-loss channel to the selected modes of a state:
/// `ρ → Σ_k E_k ρ E_k†` per mode.
pub fn loss_channel(state: &DensityState, spec: &LossSpec) -> Result<DensityState> {
    let n = state.n_modes();
    let cutoff = state.cutoff();
    if spec.applied_modes.indices().iter().any(|&m| m >= n) {
        return Err(Error::invalid("loss channel mode out of range"));
    }
    if spec.beta == 0.0 {
        return Ok(state.clone());
    }
    let kraus = kraus_operators(spec.beta, cutoff)?;
    let mut rho = state.rho().clone();
    for &mode in spec.applied_modes.indices() {
        let sel = ModeSelection::single(mode, n)?;
        let mut acc = Array2::from_elem(rho.dim(), C_ZERO);
        for e_k in kraus.iter() {
            let left = embedded_mul_left(e_k, &sel, n, cutoff, &rho)?;
            let term = embedded_mul_right(&left, &adjoint(e_k), &sel, n, cutoff)?;
            acc += &term;
        }
        rho = acc;
    }
    Ok(DensityState::from_parts_unchecked(n, cutoff, rho))
}

/// Add independent seeded draws from `Uniform(−ε, ε)` to each value.
pub fn add_data_noise(values: &[f64], spec: &DataNoiseSpec) -> Vec<f64> {
    if spec.epsilon == 0.0 {
        return values.to_vec();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    values
        .iter()
        .map(|v| v + rng.gen_range(-spec.epsilon..spec.epsilon))
        .collect()
}
