//! Dense complex linear algebra for the truncated Fock simulator.
//!
//! All operators and density matrices are stored as dense row-major
//! [`ComplexMatrix`] values. Dimensions stay small (at most a few hundred
//! for the shipped experiments), so there is no sparse machinery here.

use crate::error::{Error, Result};
use ndarray::Array2;
use num_complex::Complex64;

/// Dense complex matrix in row-major order.
pub type ComplexMatrix = Array2<Complex64>;

pub const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const C_ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Identity matrix of dimension `n`.
pub fn identity(n: usize) -> ComplexMatrix {
    Array2::from_diag_elem(n, C_ONE)
}

/// Conjugate transpose (always in standard row-major layout).
pub fn adjoint(m: &ComplexMatrix) -> ComplexMatrix {
    let (r, c) = m.dim();
    Array2::from_shape_fn((c, r), |(i, j)| m[(j, i)].conj())
}

/// Largest entry magnitude.
pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Max-norm deviation from Hermiticity, `‖M − M†‖_max`.
pub fn hermitian_deviation(m: &ComplexMatrix) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            let d = m[(i, j)] - m[(j, i)].conj();
            dev = dev.max(d.norm());
        }
    }
    dev
}

/// Errors unless `‖M − M†‖_max ≤ tol`.
pub fn ensure_hermitian(m: &ComplexMatrix, tol: f64) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            got: m.ncols(),
        });
    }
    let dev = hermitian_deviation(m);
    if dev > tol {
        return Err(Error::NotHermitian(dev));
    }
    Ok(())
}

/// Trace of a square matrix.
pub fn trace(m: &ComplexMatrix) -> Complex64 {
    m.diag().iter().sum()
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::from_elem((ar * br, ac * bc), C_ZERO);
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[(i, j)];
            if aij == C_ZERO {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Matrix exponential `exp(M)` by scaling-and-squaring with a Taylor series
/// core.
///
/// The input is scaled by `2^{-s}` until its max-norm is at most 1/2, the
/// series is summed until the term norm falls below `tolerance` scaled for
/// the subsequent squarings, and the result is squared `s` times. The error
/// of the result is bounded by `tolerance` times a conditioning factor of
/// order `‖exp(M)‖`.
pub fn matrix_exponential(m: &ComplexMatrix, tolerance: f64) -> Result<ComplexMatrix> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::invalid(format!(
            "matrix exponential requires a square matrix, got {}x{}",
            n,
            m.ncols()
        )));
    }
    if tolerance <= 0.0 {
        return Err(Error::invalid("tolerance must be positive"));
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::invalid("matrix exponential of non-finite entries"));
    }

    let norm = max_abs(m) * n as f64; // crude upper bound on the 1-norm
    let s = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let factor = Complex64::new(2f64.powi(-(s as i32)), 0.0);
    let b = m.mapv(|z| z * factor);

    // Taylor series: each squaring roughly doubles the accumulated error,
    // so target tolerance / 2^s for the core.
    let inner_tol = (tolerance * 2f64.powi(-(s as i32))).max(1e-300);
    let mut result = identity(n);
    let mut term = identity(n);
    for k in 1..200 {
        term = term.dot(&b).mapv(|z| z / k as f64);
        result += &term;
        if max_abs(&term) < inner_tol {
            break;
        }
    }
    for _ in 0..s {
        result = result.dot(&result);
    }
    Ok(result)
}
