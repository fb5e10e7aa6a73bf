//! Independent test oracles. Nothing here calls the implementation paths it
//! is used to check: coherent states come from the analytic Fock expansion,
//! eigendecompositions from a local Jacobi solver, and Bessel values from
//! quadrature of the integral representation.
#![allow(dead_code)]

use cvqrnn_core::linalg::{identity, ComplexMatrix, C_ZERO};
use ndarray::Array2;
use num_complex::Complex64;

/// Analytic coherent-state amplitudes `e^{-|α|²/2} α^m/√(m!)` up to the
/// cutoff.
pub fn coherent_amplitudes(alpha: Complex64, cutoff: usize) -> Vec<Complex64> {
    let norm = (-0.5 * alpha.norm_sqr()).exp();
    let mut amps = Vec::with_capacity(cutoff);
    let mut term = Complex64::new(norm, 0.0);
    amps.push(term);
    for m in 1..cutoff {
        term = term * alpha / Complex64::new((m as f64).sqrt(), 0.0);
        amps.push(term);
    }
    amps
}

/// Poisson photon-number distribution of a coherent state.
pub fn coherent_population(alpha: Complex64, level: usize) -> f64 {
    let mean = alpha.norm_sqr();
    let mut p = (-mean).exp();
    for k in 1..=level {
        p *= mean / k as f64;
    }
    p
}

/// Cyclic Jacobi eigendecomposition for complex Hermitian matrices. Returns
/// (eigenvalues, eigenvector columns) with `A = V·diag(λ)·V†`.
pub fn hermitian_eig(a: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let n = a.nrows();
    let mut m = a.clone();
    let mut v = identity(n);
    for _sweep in 0..200 {
        let mut off: f64 = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off = off.max(m[(p, q)].norm());
            }
        }
        if off < 1e-14 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                let b = apq.norm();
                if b < 1e-300 {
                    continue;
                }
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let phase = apq / b;
                let tau = (aqq - app) / (2.0 * b);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let s_fwd = phase * s; // G[p][q] = s·e^{iφ}
                // rows: row_p ← c·row_p − s·e^{iφ}·row_q ; row_q ← s·e^{-iφ}·row_p + c·row_q
                for j in 0..n {
                    let mp = m[(p, j)];
                    let mq = m[(q, j)];
                    m[(p, j)] = mp * c - s_fwd * mq;
                    m[(q, j)] = s_fwd.conj() * mp + mq * c;
                }
                // cols: col_p ← c·col_p − s·e^{-iφ}·col_q ; col_q ← s·e^{iφ}·col_p + c·col_q
                for i in 0..n {
                    let mp = m[(i, p)];
                    let mq = m[(i, q)];
                    m[(i, p)] = mp * c - s_fwd.conj() * mq;
                    m[(i, q)] = s_fwd * mp + mq * c;
                    let vp = v[(i, p)];
                    let vq = v[(i, q)];
                    v[(i, p)] = vp * c - s_fwd.conj() * vq;
                    v[(i, q)] = s_fwd * vp + vq * c;
                }
            }
        }
    }
    let eigs = (0..n).map(|i| m[(i, i)].re).collect();
    (eigs, v)
}

/// `exp(factor·H)` for Hermitian H through the Jacobi eigendecomposition.
pub fn expm_hermitian_oracle(h: &ComplexMatrix, factor: Complex64) -> ComplexMatrix {
    let n = h.nrows();
    let (eigs, v) = hermitian_eig(h);
    let mut out = Array2::from_elem((n, n), C_ZERO);
    for (k, &lambda) in eigs.iter().enumerate() {
        let e = (factor * lambda).exp();
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] += e * v[(i, k)] * v[(j, k)].conj();
            }
        }
    }
    out
}

/// J₀ by composite Simpson quadrature of `(1/π)∫₀^π cos(x sin τ) dτ`.
pub fn bessel_j0_quadrature(x: f64) -> f64 {
    let n = 100_000usize; // even
    let h = std::f64::consts::PI / n as f64;
    let f = |t: f64| (x * t.sin()).cos();
    let mut sum = f(0.0) + f(std::f64::consts::PI);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(k as f64 * h);
    }
    sum * h / 3.0 / std::f64::consts::PI
}

/// Seeded random Hermitian matrix with entries of magnitude ~`scale`.
pub fn random_hermitian(n: usize, scale: f64, rng: &mut impl rand::Rng) -> ComplexMatrix {
    let mut m = Array2::from_elem((n, n), C_ZERO);
    for i in 0..n {
        m[(i, i)] = Complex64::new(rng.gen_range(-scale..scale), 0.0);
        for j in i + 1..n {
            let z = Complex64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale));
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

/// Normalized random pure state on `dim` amplitudes.
pub fn random_state_vector(dim: usize, rng: &mut impl rand::Rng) -> Vec<Complex64> {
    let mut psi: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut psi {
        *z /= norm;
    }
    psi
}

// ---------------------------------------------------------------------------
// Synthetic handwritten-style digit images (28×28 grayscale, IDX-compatible)
// ---------------------------------------------------------------------------

fn paint(img: &mut [u8], x: f64, y: f64, radius: f64, intensity: u8) {
    let r_ceil = radius.ceil() as i64;
    let xi = x.round() as i64;
    let yi = y.round() as i64;
    for dy in -r_ceil..=r_ceil {
        for dx in -r_ceil..=r_ceil {
            let px = xi + dx;
            let py = yi + dy;
            if !(0..28).contains(&px) || !(0..28).contains(&py) {
                continue;
            }
            let dist = ((px as f64 - x).powi(2) + (py as f64 - y).powi(2)).sqrt();
            if dist <= radius {
                let idx = (py * 28 + px) as usize;
                img[idx] = img[idx].max(intensity);
            }
        }
    }
}

fn draw_arc(
    img: &mut [u8],
    cx: f64,
    cy: f64,
    r: f64,
    a0: f64,
    a1: f64,
    stroke: f64,
    intensity: u8,
) {
    let steps = 80;
    for k in 0..=steps {
        let a = a0 + (a1 - a0) * k as f64 / steps as f64;
        paint(img, cx + r * a.cos(), cy + r * a.sin(), stroke, intensity);
    }
}

/// A jittered "3": two right-opening arcs stacked.
pub fn draw_three(rng: &mut impl rand::Rng) -> Vec<u8> {
    let mut img = vec![0u8; 784];
    let dx = rng.gen_range(-1.5..1.5);
    let dy = rng.gen_range(-1.2..1.2);
    let r = rng.gen_range(4.2..5.2);
    let stroke = rng.gen_range(1.2..1.8);
    let ink = rng.gen_range(215..=255) as u8;
    let sweep = std::f64::consts::PI * rng.gen_range(0.52..0.60);
    draw_arc(&mut img, 12.5 + dx, 9.3 + dy, r, -sweep, sweep, stroke, ink);
    draw_arc(&mut img, 12.5 + dx, 18.7 + dy, r, -sweep, sweep, stroke, ink);
    speckle(&mut img, rng);
    img
}

/// A jittered "6": a bottom loop joined to a down-sweeping stem.
pub fn draw_six(rng: &mut impl rand::Rng) -> Vec<u8> {
    let mut img = vec![0u8; 784];
    let dx = rng.gen_range(-1.5..1.5);
    let dy = rng.gen_range(-1.2..1.2);
    let r = rng.gen_range(4.0..5.0);
    let stroke = rng.gen_range(1.2..1.8);
    let ink = rng.gen_range(215..=255) as u8;
    draw_arc(
        &mut img,
        13.5 + dx,
        18.0 + dy,
        r,
        0.0,
        2.0 * std::f64::consts::PI,
        stroke,
        ink,
    );
    // stem from the upper right curving into the loop's left side
    let steps = 60;
    for k in 0..=steps {
        let t = k as f64 / steps as f64;
        let x = 17.5 + dx - 1.5 * t - 6.0 * t * t;
        let y = 4.0 + dy + 10.5 * t;
        paint(&mut img, x, y, stroke, ink);
    }
    speckle(&mut img, rng);
    img
}

fn speckle(img: &mut [u8], rng: &mut impl rand::Rng) {
    for px in img.iter_mut() {
        if rng.gen_range(0.0..1.0) < 0.02 {
            *px = px.saturating_add(rng.gen_range(0..25));
        }
    }
}

/// A balanced, shuffled synthetic digit set (3s and 6s) in raw IDX pixel
/// form with MNIST-style labels.
pub fn synthetic_digit_set(count: usize, seed: u64) -> (Vec<Vec<u8>>, Vec<u8>) {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut images = Vec::with_capacity(count);
    let mut labels = Vec::with_capacity(count);
    for i in 0..count {
        if i % 2 == 0 {
            images.push(draw_three(&mut rng));
            labels.push(3u8);
        } else {
            images.push(draw_six(&mut rng));
            labels.push(6u8);
        }
    }
    (images, labels)
}

#[cfg(test)]
mod oracle_self_tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn jacobi_reconstructs_matrix() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let a = random_hermitian(6, 1.0, &mut rng);
        let (eigs, v) = hermitian_eig(&a);
        let mut rec = Array2::from_elem((6, 6), C_ZERO);
        for k in 0..6 {
            for i in 0..6 {
                for j in 0..6 {
                    rec[(i, j)] += Complex64::new(eigs[k], 0.0) * v[(i, k)] * v[(j, k)].conj();
                }
            }
        }
        assert!(cvqrnn_core::linalg::max_abs(&(&rec - &a)) < 1e-10);
    }

    #[test]
    fn quadrature_matches_known_j0_values() {
        // high-precision reference values of J₀
        assert!((bessel_j0_quadrature(1.0) - 0.7651976865579666).abs() < 1e-12);
        assert!((bessel_j0_quadrature(5.0) - (-0.17759677131433830)).abs() < 1e-12);
    }
}
