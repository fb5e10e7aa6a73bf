//! Truncated Fock-space operators, multi-mode embedding, partial trace, and
//! expectation values.
//!
//! Mode ordering convention: mode 0 is the top wire (first register mode) and
//! owns the slowest-varying digit of the row-major tensor index; input modes
//! occupy the highest indices and the fastest digits. The flat basis index of
//! occupations `(m_0, …, m_{n-1})` is `Σ_k m_k · D^{n-1-k}`.

use crate::error::{Error, Result};
use crate::linalg::{adjoint, ensure_hermitian, ComplexMatrix, C_ONE, C_ZERO};
use ndarray::Array2;
use num_complex::Complex64;

/// Hermiticity tolerance for density matrices and observables.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Trace may exceed 1 by at most this much (roundoff); it falls below 1 under
/// truncation leakage.
pub const TRACE_SLACK: f64 = 1e-9;

/// Strictly increasing selection of mode positions within `[0, n_modes)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModeSelection {
    indices: Vec<usize>,
}

impl ModeSelection {
    pub fn new(indices: Vec<usize>, n_modes: usize) -> Result<Self> {
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("mode indices must be strictly increasing"));
        }
        if indices.iter().any(|&i| i >= n_modes) {
            return Err(Error::invalid(format!(
                "mode index out of range for {n_modes} modes"
            )));
        }
        Ok(Self { indices })
    }

    pub fn single(index: usize, n_modes: usize) -> Result<Self> {
        Self::new(vec![index], n_modes)
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Modes of `[0, n_modes)` not in this selection, in increasing order.
    pub fn complement(&self, n_modes: usize) -> Vec<usize> {
        (0..n_modes).filter(|m| !self.indices.contains(m)).collect()
    }
}

/// Density matrix over `n_modes` qumodes, each truncated at `cutoff` Fock
/// levels.
#[derive(Debug, Clone)]
pub struct DensityState {
    n_modes: usize,
    cutoff: usize,
    rho: ComplexMatrix,
}

impl DensityState {
    /// All modes in the vacuum state `|0⟩⟨0|`.
    pub fn vacuum(n_modes: usize, cutoff: usize) -> Self {
        let dim = cutoff.pow(n_modes as u32);
        let mut rho = Array2::from_elem((dim, dim), C_ZERO);
        rho[(0, 0)] = C_ONE;
        Self {
            n_modes,
            cutoff,
            rho,
        }
    }

    /// Build from an explicit density matrix, validating Hermiticity and the
    /// trace bound.
    pub fn from_rho(n_modes: usize, cutoff: usize, rho: ComplexMatrix) -> Result<Self> {
        let dim = cutoff.pow(n_modes as u32);
        if rho.nrows() != dim || rho.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: rho.nrows(),
            });
        }
        ensure_hermitian(&rho, HERMITIAN_TOL)?;
        let tr = crate::linalg::trace(&rho);
        if tr.re < -1e-12 || tr.re > 1.0 + TRACE_SLACK || tr.im.abs() > 1e-10 {
            return Err(Error::NumericalInconsistency(format!(
                "density trace {tr} outside [0, 1 + 1e-9]"
            )));
        }
        Ok(Self {
            n_modes,
            cutoff,
            rho,
        })
    }

    /// Pure state `|ψ⟩⟨ψ|` from an amplitude vector of length `D^n`.
    pub fn from_pure(n_modes: usize, cutoff: usize, psi: &[Complex64]) -> Result<Self> {
        let dim = cutoff.pow(n_modes as u32);
        if psi.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: psi.len(),
            });
        }
        let mut rho = Array2::from_elem((dim, dim), C_ZERO);
        for i in 0..dim {
            for j in 0..dim {
                rho[(i, j)] = psi[i] * psi[j].conj();
            }
        }
        Ok(Self {
            n_modes,
            cutoff,
            rho,
        })
    }

    /// Basis state `|m_0 … m_{n-1}⟩⟨…|` from per-mode occupation numbers.
    pub fn fock_state(occupations: &[usize], cutoff: usize) -> Result<Self> {
        let n_modes = occupations.len();
        if occupations.iter().any(|&m| m >= cutoff) {
            return Err(Error::invalid("occupation at or above cutoff"));
        }
        let dim = cutoff.pow(n_modes as u32);
        let idx = occupations
            .iter()
            .fold(0usize, |acc, &m| acc * cutoff + m);
        let mut rho = Array2::from_elem((dim, dim), C_ZERO);
        rho[(idx, idx)] = C_ONE;
        Ok(Self {
            n_modes,
            cutoff,
            rho,
        })
    }

    pub(crate) fn from_parts_unchecked(
        n_modes: usize,
        cutoff: usize,
        rho: ComplexMatrix,
    ) -> Self {
        Self {
            n_modes,
            cutoff,
            rho,
        }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// Hilbert-space dimension `D^n`.
    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn rho(&self) -> &ComplexMatrix {
        &self.rho
    }

    /// Real part of the trace (the imaginary part is zero for valid states).
    pub fn trace(&self) -> f64 {
        crate::linalg::trace(&self.rho).re
    }
}

/// Per-mode index strides: mode `m` has stride `D^{n-1-m}`.
pub(crate) fn mode_strides(n_modes: usize, cutoff: usize) -> Vec<usize> {
    (0..n_modes)
        .map(|m| cutoff.pow((n_modes - 1 - m) as u32))
        .collect()
}

/// Flat offsets of every digit combination over the given modes, enumerated
/// row-major (first listed mode is the slowest digit).
pub(crate) fn digit_offsets(modes: &[usize], n_modes: usize, cutoff: usize) -> Vec<usize> {
    let strides = mode_strides(n_modes, cutoff);
    let k = modes.len();
    let count = cutoff.pow(k as u32);
    let mut out = vec![0usize; count];
    for (idx, slot) in out.iter_mut().enumerate() {
        let mut rem = idx;
        let mut off = 0;
        for j in (0..k).rev() {
            off += (rem % cutoff) * strides[modes[j]];
            rem /= cutoff;
        }
        *slot = off;
    }
    out
}

/// Annihilation operator `â` at the given cutoff: `a[m, m+1] = √(m+1)`.
pub fn annihilation(cutoff: usize) -> Result<ComplexMatrix> {
    if cutoff < 2 {
        return Err(Error::invalid("annihilation requires cutoff ≥ 2"));
    }
    let mut a = Array2::from_elem((cutoff, cutoff), C_ZERO);
    for m in 0..cutoff - 1 {
        a[(m, m + 1)] = Complex64::new(((m + 1) as f64).sqrt(), 0.0);
    }
    Ok(a)
}

/// Creation operator `â†`.
pub fn creation(cutoff: usize) -> Result<ComplexMatrix> {
    Ok(adjoint(&annihilation(cutoff)?))
}

/// Number operator `n̂ = â†â`, exactly `diag(0, 1, …, D-1)`.
pub fn number_operator(cutoff: usize) -> Result<ComplexMatrix> {
    if cutoff < 1 {
        return Err(Error::invalid("number operator requires cutoff ≥ 1"));
    }
    let mut n = Array2::from_elem((cutoff, cutoff), C_ZERO);
    for m in 0..cutoff {
        n[(m, m)] = Complex64::new(m as f64, 0.0);
    }
    Ok(n)
}

/// Position quadrature `x̂ = (â + â†)/√2`.
///
/// With this normalization a coherent state `|α⟩` has `⟨x̂⟩ = √2·Re α`.
pub fn quadrature_x(cutoff: usize) -> Result<ComplexMatrix> {
    let a = annihilation(cutoff)?;
    let ad = adjoint(&a);
    let inv_sqrt2 = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    Ok((&a + &ad).mapv(|z| z * inv_sqrt2))
}

/// Embed an operator acting on `target_modes` into the full `n_modes` space,
/// acting as the identity elsewhere. Mode ordering is preserved: the
/// operator's own row-major digits correspond to the selected modes in
/// increasing order.
pub fn embed(
    op: &ComplexMatrix,
    target_modes: &ModeSelection,
    n_modes: usize,
    cutoff: usize,
) -> Result<ComplexMatrix> {
    let k = target_modes.len();
    let op_dim = cutoff.pow(k as u32);
    if op.nrows() != op_dim || op.ncols() != op_dim {
        return Err(Error::DimensionMismatch {
            expected: op_dim,
            got: op.nrows(),
        });
    }
    let dim = cutoff.pow(n_modes as u32);
    let env = target_modes.complement(n_modes);
    let t_off = digit_offsets(target_modes.indices(), n_modes, cutoff);
    let e_off = digit_offsets(&env, n_modes, cutoff);

    let mut out = Array2::from_elem((dim, dim), C_ZERO);
    {
        let out_flat = out.as_slice_mut().expect("standard layout");
        for &base in &e_off {
            for (r, &ro) in t_off.iter().enumerate() {
                let row = base + ro;
                for (c, &co) in t_off.iter().enumerate() {
                    out_flat[row * dim + base + co] = op[(r, c)];
                }
            }
        }
    }
    Ok(out)
}

/// Conjugate the state by a unitary: `ρ → U ρ U†`.
pub fn apply_unitary(state: &DensityState, u: &ComplexMatrix) -> Result<DensityState> {
    let dim = state.dim();
    if u.nrows() != dim || u.ncols() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: u.nrows(),
        });
    }
    let rho = u.dot(state.rho()).dot(&adjoint(u));
    Ok(DensityState::from_parts_unchecked(
        state.n_modes(),
        state.cutoff(),
        rho,
    ))
}

/// Trace out the selected modes, returning the reduced state over the rest
/// (mode order preserved).
pub fn partial_trace(state: &DensityState, traced: &ModeSelection) -> Result<DensityState> {
    let n = state.n_modes();
    if traced.indices().iter().any(|&m| m >= n) {
        return Err(Error::invalid("traced mode out of range"));
    }
    if traced.len() >= n {
        return Err(Error::invalid(
            "cannot trace all modes; use trace() instead",
        ));
    }
    if traced.is_empty() {
        return Ok(state.clone());
    }
    let cutoff = state.cutoff();
    let keep = traced.complement(n);
    let keep_off = digit_offsets(&keep, n, cutoff);
    let tr_off = digit_offsets(traced.indices(), n, cutoff);
    let out_dim = keep_off.len();
    let dim = state.dim();
    let rho_flat = state.rho().as_slice().expect("standard layout");

    let mut out = Array2::from_elem((out_dim, out_dim), C_ZERO);
    {
        let out_flat = out.as_slice_mut().expect("standard layout");
        for (i, &io) in keep_off.iter().enumerate() {
            for (j, &jo) in keep_off.iter().enumerate() {
                let mut acc = C_ZERO;
                for &eo in &tr_off {
                    acc += rho_flat[(io + eo) * dim + jo + eo];
                }
                out_flat[i * out_dim + j] = acc;
            }
        }
    }
    Ok(DensityState::from_parts_unchecked(
        n - traced.len(),
        cutoff,
        out,
    ))
}

/// Tensor fresh vacuum modes into the state. `positions` gives the indices
/// the new modes occupy in the output ordering; existing modes keep their
/// relative order in the remaining slots.
pub fn tensor_with_vacuum(
    state: &DensityState,
    new_modes: usize,
    positions: &ModeSelection,
) -> Result<DensityState> {
    if positions.len() != new_modes {
        return Err(Error::invalid(format!(
            "{} positions given for {} new modes",
            positions.len(),
            new_modes
        )));
    }
    let n_out = state.n_modes() + new_modes;
    if positions.indices().iter().any(|&p| p >= n_out) {
        return Err(Error::invalid("vacuum position out of range"));
    }
    let cutoff = state.cutoff();
    let old_slots = positions.complement(n_out);
    // old mode m sits at output position old_slots[m]
    let old_off = digit_offsets(&old_slots, n_out, cutoff);
    let out_dim = cutoff.pow(n_out as u32);
    let old_dim = state.dim();
    let rho_flat = state.rho().as_slice().expect("standard layout");

    let mut out = Array2::from_elem((out_dim, out_dim), C_ZERO);
    {
        let out_flat = out.as_slice_mut().expect("standard layout");
        for i in 0..old_dim {
            let row = old_off[i];
            for j in 0..old_dim {
                out_flat[row * out_dim + old_off[j]] = rho_flat[i * old_dim + j];
            }
        }
    }
    Ok(DensityState::from_parts_unchecked(n_out, cutoff, out))
}

/// Expectation value `Re Tr(ρ·O)` of a Hermitian observable.
pub fn expectation(state: &DensityState, observable: &ComplexMatrix) -> Result<f64> {
    ensure_hermitian(observable, HERMITIAN_TOL)?;
    let dim = state.dim();
    if observable.nrows() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: observable.nrows(),
        });
    }
    let rho_flat = state.rho().as_slice().expect("standard layout");
    let obs_flat = observable.as_slice().expect("standard layout");
    let mut acc = C_ZERO;
    for i in 0..dim {
        for j in 0..dim {
            acc += rho_flat[i * dim + j] * obs_flat[j * dim + i];
        }
    }
    if acc.im.abs() > 1e-9 {
        return Err(Error::NumericalInconsistency(format!(
            "expectation has imaginary residue {:.3e}",
            acc.im
        )));
    }
    Ok(acc.re)
}

/// Left-multiply by an embedded operator without forming the full embedding:
/// `out = embed(op, targets) · m`. Bit-compatible with the embed path within
/// 1e-12 (it performs the same sums in the same digit order).
pub fn embedded_mul_left(
    op: &ComplexMatrix,
    target_modes: &ModeSelection,
    n_modes: usize,
    cutoff: usize,
    m: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let k = target_modes.len();
    let op_dim = cutoff.pow(k as u32);
    if op.nrows() != op_dim || op.ncols() != op_dim {
        return Err(Error::DimensionMismatch {
            expected: op_dim,
            got: op.nrows(),
        });
    }
    let dim = cutoff.pow(n_modes as u32);
    if m.nrows() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: m.nrows(),
        });
    }
    let cols = m.ncols();
    let env = target_modes.complement(n_modes);
    let t_off = digit_offsets(target_modes.indices(), n_modes, cutoff);
    let e_off = digit_offsets(&env, n_modes, cutoff);
    let m_flat = m.as_slice().expect("standard layout");
    let op_flat = op.as_slice().expect("standard layout");

    let mut out = Array2::from_elem((dim, cols), C_ZERO);
    {
        let out_flat = out.as_slice_mut().expect("standard layout");
        for &base in &e_off {
            for (r, &ro) in t_off.iter().enumerate() {
                let out_row = &mut out_flat[(base + ro) * cols..(base + ro + 1) * cols];
                for (c, &co) in t_off.iter().enumerate() {
                    let g = op_flat[r * op_dim + c];
                    if g == C_ZERO {
                        continue;
                    }
                    let src = &m_flat[(base + co) * cols..(base + co + 1) * cols];
                    for (o, s) in out_row.iter_mut().zip(src) {
                        *o += g * s;
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Right-multiply by an embedded operator: `out = m · embed(op, targets)`.
pub fn embedded_mul_right(
    m: &ComplexMatrix,
    op: &ComplexMatrix,
    target_modes: &ModeSelection,
    n_modes: usize,
    cutoff: usize,
) -> Result<ComplexMatrix> {
    let k = target_modes.len();
    let op_dim = cutoff.pow(k as u32);
    if op.nrows() != op_dim || op.ncols() != op_dim {
        return Err(Error::DimensionMismatch {
            expected: op_dim,
            got: op.nrows(),
        });
    }
    let dim = cutoff.pow(n_modes as u32);
    if m.ncols() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: m.ncols(),
        });
    }
    let rows = m.nrows();
    let env = target_modes.complement(n_modes);
    let t_off = digit_offsets(target_modes.indices(), n_modes, cutoff);
    let e_off = digit_offsets(&env, n_modes, cutoff);
    let m_flat = m.as_slice().expect("standard layout");
    let op_flat = op.as_slice().expect("standard layout");

    let mut out = Array2::from_elem((rows, dim), C_ZERO);
    {
        let out_flat = out.as_slice_mut().expect("standard layout");
        for row in 0..rows {
            let src_row = &m_flat[row * dim..(row + 1) * dim];
            let dst_row = &mut out_flat[row * dim..(row + 1) * dim];
            for &base in &e_off {
                for (c, &co) in t_off.iter().enumerate() {
                    let mut acc = C_ZERO;
                    for (cp, &cpo) in t_off.iter().enumerate() {
                        acc += src_row[base + cpo] * op_flat[cp * op_dim + c];
                    }
                    dst_row[base + co] = acc;
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn annihilation_cutoff_two() {
        let a = annihilation(2).unwrap();
        assert_eq!(a[(0, 1)], C_ONE);
        assert_eq!(a[(0, 0)], C_ZERO);
        assert_eq!(a[(1, 0)], C_ZERO);
        assert_eq!(a[(1, 1)], C_ZERO);
    }

    #[test]
    fn annihilation_sqrt_entries() {
        let a = annihilation(3).unwrap();
        assert!((a[(1, 2)].re - 2f64.sqrt()).abs() < 1e-15);
        assert!(annihilation(1).is_err());
    }

    #[test]
    fn creation_is_adjoint_of_annihilation() {
        for cutoff in [2, 5, 9] {
            let a = annihilation(cutoff).unwrap();
            let c = creation(cutoff).unwrap();
            assert_eq!(crate::linalg::max_abs(&(&c - &adjoint(&a))), 0.0);
        }
    }

    #[test]
    fn number_operator_diagonal_and_product_identity() {
        let n = number_operator(3).unwrap();
        assert_eq!(n[(0, 0)], C_ZERO);
        assert_eq!(n[(1, 1)], C_ONE);
        assert_eq!(n[(2, 2)], Complex64::new(2.0, 0.0));
        for cutoff in [2, 4, 7] {
            let n = number_operator(cutoff).unwrap();
            let prod = creation(cutoff).unwrap().dot(&annihilation(cutoff).unwrap());
            assert!(crate::linalg::max_abs(&(&n - &prod)) < 1e-14);
            let tr = crate::linalg::trace(&n).re;
            assert_eq!(tr, (cutoff * (cutoff - 1) / 2) as f64);
        }
    }

    #[test]
    fn quadrature_is_hermitian_with_zero_vacuum_mean() {
        let x = quadrature_x(6).unwrap();
        assert_eq!(crate::linalg::hermitian_deviation(&x), 0.0);
        let vac = DensityState::vacuum(1, 6);
        assert_eq!(expectation(&vac, &x).unwrap(), 0.0);
    }

    #[test]
    fn embed_identity_is_identity() {
        let sel = ModeSelection::new(vec![1], 3).unwrap();
        let e = embed(&crate::linalg::identity(2), &sel, 3, 2).unwrap();
        assert!(crate::linalg::max_abs(&(&e - &crate::linalg::identity(8))) == 0.0);
    }

    #[test]
    fn embed_mode_zero_is_left_kron() {
        let op = annihilation(2).unwrap();
        let sel = ModeSelection::new(vec![0], 2).unwrap();
        let e = embed(&op, &sel, 2, 2).unwrap();
        let k = crate::linalg::kron(&op, &crate::linalg::identity(2));
        assert_eq!(crate::linalg::max_abs(&(&e - &k)), 0.0);
    }

    #[test]
    fn embed_respects_composition() {
        let a = annihilation(3).unwrap();
        let n = number_operator(3).unwrap();
        let sel = ModeSelection::new(vec![1], 2).unwrap();
        let lhs = embed(&a, &sel, 2, 3)
            .unwrap()
            .dot(&embed(&n, &sel, 2, 3).unwrap());
        let rhs = embed(&a.dot(&n), &sel, 2, 3).unwrap();
        assert!(crate::linalg::max_abs(&(&lhs - &rhs)) < 1e-14);
    }

    #[test]
    fn partial_trace_of_product_state_recovers_factor() {
        // |1⟩⟨1| ⊗ |2⟩⟨2| traced over mode 1 → |1⟩⟨1|
        let st = DensityState::fock_state(&[1, 2], 3).unwrap();
        let reduced = partial_trace(&st, &ModeSelection::new(vec![1], 2).unwrap()).unwrap();
        let expect = DensityState::fock_state(&[1], 3).unwrap();
        assert_eq!(
            crate::linalg::max_abs(&(reduced.rho() - expect.rho())),
            0.0
        );
    }

    #[test]
    fn partial_trace_preserves_trace_and_rejects_all_modes() {
        let st = DensityState::fock_state(&[1, 0], 4).unwrap();
        let sel = ModeSelection::new(vec![0], 2).unwrap();
        let red = partial_trace(&st, &sel).unwrap();
        assert!((red.trace() - st.trace()).abs() < 1e-12);
        let all = ModeSelection::new(vec![0, 1], 2).unwrap();
        assert!(partial_trace(&st, &all).is_err());
    }

    #[test]
    fn bell_like_state_reduces_to_maximally_mixed() {
        // (|00⟩ + |11⟩)/√2 over two modes at cutoff 3
        let dim = 9;
        let mut psi = vec![C_ZERO; dim];
        let amp = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        psi[0] = amp; // |00⟩
        psi[4] = amp; // |11⟩
        let st = DensityState::from_pure(2, 3, &psi).unwrap();
        let red = partial_trace(&st, &ModeSelection::new(vec![1], 2).unwrap()).unwrap();
        assert!((red.rho()[(0, 0)].re - 0.5).abs() < 1e-15);
        assert!((red.rho()[(1, 1)].re - 0.5).abs() < 1e-15);
        assert!(red.rho()[(2, 2)].norm() < 1e-15);
        assert!(red.rho()[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn vacuum_tensor_round_trip_is_exact() {
        let st = DensityState::fock_state(&[2, 1], 3).unwrap();
        let pos = ModeSelection::new(vec![2], 3).unwrap();
        let grown = tensor_with_vacuum(&st, 1, &pos).unwrap();
        assert_eq!(grown.n_modes(), 3);
        assert!((grown.trace() - st.trace()).abs() < 1e-15);
        let back = partial_trace(&grown, &ModeSelection::new(vec![2], 3).unwrap()).unwrap();
        assert_eq!(crate::linalg::max_abs(&(back.rho() - st.rho())), 0.0);
    }

    #[test]
    fn vacuum_positions_validated() {
        let st = DensityState::vacuum(1, 3);
        let bad = ModeSelection::new(vec![0], 2).unwrap();
        assert!(tensor_with_vacuum(&st, 2, &bad).is_err());
    }

    #[test]
    fn expectation_examples() {
        let n6 = number_operator(6).unwrap();
        let vac = DensityState::vacuum(1, 6);
        assert_eq!(expectation(&vac, &n6).unwrap(), 0.0);

        let two = DensityState::fock_state(&[2], 6).unwrap();
        assert_eq!(expectation(&two, &n6).unwrap(), 2.0);

        let mut rho = Array2::from_elem((3, 3), C_ZERO);
        rho[(0, 0)] = Complex64::new(0.5, 0.0);
        rho[(1, 1)] = Complex64::new(0.3, 0.0);
        rho[(2, 2)] = Complex64::new(0.2, 0.0);
        let st = DensityState::from_rho(1, 3, rho).unwrap();
        let n3 = number_operator(3).unwrap();
        assert!((expectation(&st, &n3).unwrap() - 0.7).abs() < 1e-15);
    }

    #[test]
    fn expectation_rejects_non_hermitian() {
        let vac = DensityState::vacuum(1, 4);
        let a = annihilation(4).unwrap();
        assert!(matches!(
            expectation(&vac, &a),
            Err(Error::NotHermitian(_))
        ));
    }

    #[test]
    fn embedded_mul_matches_embed_path() {
        let op = annihilation(3).unwrap();
        let sel = ModeSelection::new(vec![1], 3).unwrap();
        let mut m = Array2::from_elem((27, 27), C_ZERO);
        for i in 0..27 {
            for j in 0..27 {
                m[(i, j)] = Complex64::new((i * 31 + j) as f64 * 0.01, (j + 1) as f64 * 0.002);
            }
        }
        let full = embed(&op, &sel, 3, 3).unwrap();
        let left_ref = full.dot(&m);
        let left_fast = embedded_mul_left(&op, &sel, 3, 3, &m).unwrap();
        assert!(crate::linalg::max_abs(&(&left_ref - &left_fast)) < 1e-12);

        let right_ref = m.dot(&full);
        let right_fast = embedded_mul_right(&m, &op, &sel, 3, 3).unwrap();
        assert!(crate::linalg::max_abs(&(&right_ref - &right_fast)) < 1e-12);
    }
}
