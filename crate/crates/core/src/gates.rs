//! The CV gate set (displacement, squeezing, phase, beam splitter),
//! Clements-mesh interferometers, and the trainable layer unitary.
//!
//! Gates are built by exponentiating truncated generators, so every gate is
//! exactly unitary at its construction cutoff. Gate matrices are memoized per
//! (parameter value, cutoff) in a process-wide cache; a finite-difference
//! perturbation therefore recomputes only the touched gate.

use crate::error::{Error, Result};
use crate::fock::{annihilation, embedded_mul_left, ModeSelection};
use crate::linalg::{adjoint, identity, matrix_exponential, ComplexMatrix, C_ZERO};
use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Structural bound on squeezing amplitudes, limiting truncation leakage.
pub const DEFAULT_SQUEEZE_CLAMP: f64 = 1.4;

const EXPM_TOL: f64 = 1e-14;

#[derive(Clone, PartialEq, Eq, Hash)]
enum GateKey {
    Displacement(u64, u64, usize),
    Squeezing(u64, usize),
    Beamsplitter(u64, usize),
}

fn gate_cache() -> &'static Mutex<HashMap<GateKey, Arc<ComplexMatrix>>> {
    static CACHE: OnceLock<Mutex<HashMap<GateKey, Arc<ComplexMatrix>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn cached(key: GateKey, build: impl FnOnce() -> Result<ComplexMatrix>) -> Result<Arc<ComplexMatrix>> {
    {
        let cache = gate_cache().lock().unwrap();
        if let Some(m) = cache.get(&key) {
            return Ok(Arc::clone(m));
        }
    }
    let built = Arc::new(build()?);
    let mut cache = gate_cache().lock().unwrap();
    if cache.len() > 8192 {
        cache.clear();
    }
    cache.insert(key, Arc::clone(&built));
    Ok(built)
}

/// Displacement gate `D(α) = exp(α·â† − α*·â)`.
pub fn displacement_gate(alpha: Complex64, cutoff: usize) -> Result<ComplexMatrix> {
    Ok(displacement_cached(alpha, cutoff)?.as_ref().clone())
}

pub(crate) fn displacement_cached(alpha: Complex64, cutoff: usize) -> Result<Arc<ComplexMatrix>> {
    if !alpha.re.is_finite() || !alpha.im.is_finite() {
        return Err(Error::invalid("displacement amplitude must be finite"));
    }
    cached(
        GateKey::Displacement(alpha.re.to_bits(), alpha.im.to_bits(), cutoff),
        || {
            let a = annihilation(cutoff)?;
            let ad = adjoint(&a);
            let gen = &ad.mapv(|z| z * alpha) - &a.mapv(|z| z * alpha.conj());
            matrix_exponential(&gen, EXPM_TOL)
        },
    )
}

/// Squeezing gate `S(r) = exp((r/2)(â² − â†²))` with real amplitude.
pub fn squeezing_gate(r: f64, cutoff: usize) -> Result<ComplexMatrix> {
    Ok(squeezing_cached(r, cutoff)?.as_ref().clone())
}

pub(crate) fn squeezing_cached(r: f64, cutoff: usize) -> Result<Arc<ComplexMatrix>> {
    if !r.is_finite() || r.abs() > DEFAULT_SQUEEZE_CLAMP {
        return Err(Error::invalid(format!(
            "squeezing amplitude {r} outside clamp ±{DEFAULT_SQUEEZE_CLAMP}"
        )));
    }
    cached(GateKey::Squeezing(r.to_bits(), cutoff), || {
        let a = annihilation(cutoff)?;
        let ad = adjoint(&a);
        let half_r = Complex64::new(r / 2.0, 0.0);
        let gen = (&a.dot(&a) - &ad.dot(&ad)).mapv(|z| z * half_r);
        matrix_exponential(&gen, EXPM_TOL)
    })
}

/// Phase gate `R(φ)`: exact diagonal with entries `e^{-iφm}`.
pub fn phase_gate(phi: f64, cutoff: usize) -> Result<ComplexMatrix> {
    if !phi.is_finite() {
        return Err(Error::invalid("phase must be finite"));
    }
    let mut out = Array2::from_elem((cutoff, cutoff), C_ZERO);
    for m in 0..cutoff {
        out[(m, m)] = Complex64::new(0.0, -phi * m as f64).exp();
    }
    Ok(out)
}

/// Beam-splitter gate `B(θ) = exp(θ(â†b̂ − âb̂†))` on two modes (dimension D²).
pub fn beamsplitter_gate(theta: f64, cutoff: usize) -> Result<ComplexMatrix> {
    Ok(beamsplitter_cached(theta, cutoff)?.as_ref().clone())
}

pub(crate) fn beamsplitter_cached(theta: f64, cutoff: usize) -> Result<Arc<ComplexMatrix>> {
    if !theta.is_finite() {
        return Err(Error::invalid("beam-splitter angle must be finite"));
    }
    cached(GateKey::Beamsplitter(theta.to_bits(), cutoff), || {
        let a = annihilation(cutoff)?;
        let ad = adjoint(&a);
        let t = Complex64::new(theta, 0.0);
        let gen = (&crate::linalg::kron(&ad, &a) - &crate::linalg::kron(&a, &ad)).mapv(|z| z * t);
        matrix_exponential(&gen, EXPM_TOL)
    })
}

/// Clements-mesh parameterization of a multiport interferometer.
///
/// `theta` and `phi` hold one beam-splitter angle and one internal phase per
/// mesh element in diagonal-sweep order; `final_rot` holds output phase
/// rotations on modes `0..max(1, n-1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterferometerSpec {
    n_modes: usize,
    theta: Vec<f64>,
    phi: Vec<f64>,
    final_rot: Vec<f64>,
}

impl InterferometerSpec {
    pub fn new(n_modes: usize, theta: Vec<f64>, phi: Vec<f64>, final_rot: Vec<f64>) -> Result<Self> {
        let pairs = n_modes * (n_modes.saturating_sub(1)) / 2;
        let rots = 1.max(n_modes.saturating_sub(1));
        if theta.len() != pairs || phi.len() != pairs {
            return Err(Error::invalid(format!(
                "interferometer on {n_modes} modes requires {pairs} theta/phi entries"
            )));
        }
        if final_rot.len() != rots {
            return Err(Error::invalid(format!(
                "interferometer on {n_modes} modes requires {rots} final rotations"
            )));
        }
        Ok(Self {
            n_modes,
            theta,
            phi,
            final_rot,
        })
    }

    pub fn zeros(n_modes: usize) -> Self {
        let pairs = n_modes * (n_modes.saturating_sub(1)) / 2;
        let rots = 1.max(n_modes.saturating_sub(1));
        Self {
            n_modes,
            theta: vec![0.0; pairs],
            phi: vec![0.0; pairs],
            final_rot: vec![0.0; rots],
        }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn final_rot(&self) -> &[f64] {
        &self.final_rot
    }

    /// Real parameters of one interferometer: `n(n-1) + max(1, n-1)`.
    pub fn param_count(n_modes: usize) -> usize {
        n_modes * n_modes.saturating_sub(1) + 1.max(n_modes.saturating_sub(1))
    }

    /// Top mode index of every mesh element in diagonal-sweep order: sweep
    /// layers alternate between even and odd starting wires.
    pub fn mesh_order(n_modes: usize) -> Vec<usize> {
        let mut order = Vec::with_capacity(n_modes * n_modes.saturating_sub(1) / 2);
        for layer in 0..n_modes {
            let mut i = layer % 2;
            while i + 1 < n_modes {
                order.push(i);
                i += 2;
            }
        }
        order
    }
}

/// All trainable gate parameters of one CV-QRNN layer plus the output scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerParams {
    pub interferometer_1: InterferometerSpec,
    pub interferometer_2: InterferometerSpec,
    /// Squeezing amplitudes, one per mode (register modes first).
    pub squeeze: Vec<f64>,
    /// Complex displacement amplitudes, one per mode.
    pub displace: Vec<Complex64>,
    /// Output rescaling factor γ.
    pub gamma: f64,
}

impl LayerParams {
    /// The all-zero parameter vector (γ = 0 included, so the network output
    /// is identically zero).
    pub fn zeros(n_modes: usize) -> Self {
        Self {
            interferometer_1: InterferometerSpec::zeros(n_modes),
            interferometer_2: InterferometerSpec::zeros(n_modes),
            squeeze: vec![0.0; n_modes],
            displace: vec![C_ZERO; n_modes],
            gamma: 0.0,
        }
    }

    pub fn n_modes(&self) -> usize {
        self.squeeze.len()
    }

    /// Total real-parameter count: `2(n² + max(1, n-1)) + n + 1`.
    pub fn param_count(n_modes: usize) -> usize {
        2 * (n_modes * n_modes + 1.max(n_modes.saturating_sub(1))) + n_modes + 1
    }

    /// Flatten to a real vector in the documented order:
    /// `[I₁ θ | I₁ φ | I₁ final | I₂ θ | I₂ φ | I₂ final | r | (Re α, Im α) per mode | γ]`.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(Self::param_count(self.n_modes()));
        for spec in [&self.interferometer_1, &self.interferometer_2] {
            v.extend_from_slice(&spec.theta);
            v.extend_from_slice(&spec.phi);
            v.extend_from_slice(&spec.final_rot);
        }
        v.extend_from_slice(&self.squeeze);
        for a in &self.displace {
            v.push(a.re);
            v.push(a.im);
        }
        v.push(self.gamma);
        v
    }

    pub fn from_flat(n_modes: usize, flat: &[f64]) -> Result<Self> {
        let expected = Self::param_count(n_modes);
        if flat.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: flat.len(),
            });
        }
        let pairs = n_modes * n_modes.saturating_sub(1) / 2;
        let rots = 1.max(n_modes.saturating_sub(1));
        let mut pos = 0;
        let mut take = |len: usize| {
            let s = flat[pos..pos + len].to_vec();
            pos += len;
            s
        };
        let i1 = InterferometerSpec::new(n_modes, take(pairs), take(pairs), take(rots))?;
        let i2 = InterferometerSpec::new(n_modes, take(pairs), take(pairs), take(rots))?;
        let squeeze = take(n_modes);
        let d_flat = take(2 * n_modes);
        let displace = d_flat
            .chunks_exact(2)
            .map(|c| Complex64::new(c[0], c[1]))
            .collect();
        let gamma = take(1)[0];
        Ok(Self {
            interferometer_1: i1,
            interferometer_2: i2,
            squeeze,
            displace,
            gamma,
        })
    }

    /// Index range of the squeezing amplitudes in the flat layout (the block
    /// the optimizer clamps).
    pub fn squeeze_flat_range(n_modes: usize) -> std::ops::Range<usize> {
        let per_interferometer = InterferometerSpec::param_count(n_modes);
        let start = 2 * per_interferometer;
        start..start + n_modes
    }

    /// Random initialization: angles uniform on (0, 2π), squeezing and
    /// displacement components uniform on (−0.1, 0.1), γ = 1. Draws happen in
    /// flat-layout order.
    pub fn random_init(n_modes: usize, rng: &mut impl rand::Rng) -> Self {
        let pairs = n_modes * n_modes.saturating_sub(1) / 2;
        let rots = 1.max(n_modes.saturating_sub(1));
        let mut angles = |count: usize| -> Vec<f64> {
            (0..count)
                .map(|_| rng.gen_range(0.0..2.0 * std::f64::consts::PI))
                .collect()
        };
        let i1 = InterferometerSpec::new(n_modes, angles(pairs), angles(pairs), angles(rots))
            .expect("lengths by construction");
        let i2 = InterferometerSpec::new(n_modes, angles(pairs), angles(pairs), angles(rots))
            .expect("lengths by construction");
        let squeeze = (0..n_modes).map(|_| rng.gen_range(-0.1..0.1)).collect();
        let displace = (0..n_modes)
            .map(|_| Complex64::new(rng.gen_range(-0.1..0.1), rng.gen_range(-0.1..0.1)))
            .collect();
        Self {
            interferometer_1: i1,
            interferometer_2: i2,
            squeeze,
            displace,
            gamma: 1.0,
        }
    }
}

/// One gate of a circuit: a small matrix and the modes it acts on.
pub struct GateOp {
    pub matrix: Arc<ComplexMatrix>,
    pub modes: Vec<usize>,
}

/// Gate sequence of an interferometer in application order: per mesh element,
/// the internal phase on the top wire then the beam splitter, and finally the
/// output rotations.
pub fn interferometer_ops(spec: &InterferometerSpec, cutoff: usize) -> Result<Vec<GateOp>> {
    let n = spec.n_modes;
    let mut ops = Vec::new();
    for (k, &i) in InterferometerSpec::mesh_order(n).iter().enumerate() {
        ops.push(GateOp {
            matrix: Arc::new(phase_gate(spec.phi[k], cutoff)?),
            modes: vec![i],
        });
        ops.push(GateOp {
            matrix: beamsplitter_cached(spec.theta[k], cutoff)?,
            modes: vec![i, i + 1],
        });
    }
    for (m, &rot) in spec.final_rot.iter().enumerate() {
        ops.push(GateOp {
            matrix: Arc::new(phase_gate(rot, cutoff)?),
            modes: vec![m],
        });
    }
    Ok(ops)
}

/// Gate sequence of the trainable layer `U = D(α)·I₂·S(r)·I₁` in application
/// order (I₁ first).
pub fn layer_ops(params: &LayerParams, cutoff: usize) -> Result<Vec<GateOp>> {
    let mut ops = interferometer_ops(&params.interferometer_1, cutoff)?;
    for (m, &r) in params.squeeze.iter().enumerate() {
        ops.push(GateOp {
            matrix: squeezing_cached(r, cutoff)?,
            modes: vec![m],
        });
    }
    ops.extend(interferometer_ops(&params.interferometer_2, cutoff)?);
    for (m, &alpha) in params.displace.iter().enumerate() {
        ops.push(GateOp {
            matrix: displacement_cached(alpha, cutoff)?,
            modes: vec![m],
        });
    }
    Ok(ops)
}

/// Compose a gate sequence into a full-space unitary by successive
/// mode-structured left-multiplications.
pub fn compose_ops(ops: &[GateOp], n_modes: usize, cutoff: usize) -> Result<ComplexMatrix> {
    let dim = cutoff.pow(n_modes as u32);
    let mut acc = identity(dim);
    for op in ops {
        let sel = ModeSelection::new(op.modes.clone(), n_modes)?;
        acc = embedded_mul_left(&op.matrix, &sel, n_modes, cutoff, &acc)?;
    }
    Ok(acc)
}

/// Full-space unitary of a Clements-mesh interferometer.
pub fn interferometer_unitary(spec: &InterferometerSpec, cutoff: usize) -> Result<ComplexMatrix> {
    compose_ops(&interferometer_ops(spec, cutoff)?, spec.n_modes, cutoff)
}

/// Full-space trainable unitary of one layer, `U = D(α)·I₂·S(r)·I₁`
/// (rightmost factor applied first).
pub fn layer_trainable_unitary(params: &LayerParams, cutoff: usize) -> Result<ComplexMatrix> {
    compose_ops(&layer_ops(params, cutoff)?, params.n_modes(), cutoff)
}
