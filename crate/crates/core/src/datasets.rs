//! Synthetic series generators, sliding-window splits, and IDX image data.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::Path;

/// Bessel function of the first kind, order zero, to absolute error below
/// 1e-10 on |x| ≤ 40.
///
/// Power series for |x| ≤ 13 (roundoff stays below 1e-11 there), Hankel
/// asymptotic expansion beyond, truncated at its smallest term.
pub fn bessel_j0(x: f64) -> f64 {
    let ax = x.abs();
    if ax <= 13.0 {
        // Σ (-1)^k (x²/4)^k / (k!)²
        let q = 0.25 * ax * ax;
        let mut term = 1.0f64;
        let mut sum = 1.0f64;
        for k in 1..200 {
            term *= -q / ((k * k) as f64);
            sum += term;
            if term.abs() < 1e-18 {
                break;
            }
        }
        sum
    } else {
        // J₀(x) ≈ √(2/πx)·[P(x)cos(x − π/4) − Q(x)sin(x − π/4)] with
        // c_0 = 1, c_m = c_{m-1}·(2m−1)²/(8m);
        // P = 1 − c₂/x² + c₄/x⁴ − …, Q = −c₁/x + c₃/x³ − …
        let mut c = 1.0f64;
        let mut p = 1.0f64;
        let mut q = 0.0f64;
        let mut prev = f64::INFINITY;
        for m in 1..40 {
            c *= ((2 * m - 1) * (2 * m - 1)) as f64 / (8 * m) as f64;
            let term = c / ax.powi(m as i32);
            if term.abs() > prev {
                break; // asymptotic series started diverging
            }
            prev = term.abs();
            let sign = if (m / 2) % 2 == 0 { 1.0 } else { -1.0 };
            if m % 2 == 1 {
                q += -sign * term;
            } else {
                p += sign * term;
            }
        }
        let chi = ax - std::f64::consts::FRAC_PI_4;
        (2.0 / (std::f64::consts::PI * ax)).sqrt() * (p * chi.cos() - q * chi.sin())
    }
}

/// Shipped series generators. All values lie in [−1, 1].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeriesKind {
    Bessel,
    Sine,
    TwoSine,
    Triangle,
    DampedCosine,
}

impl SeriesKind {
    pub fn evaluate(self, x: f64) -> f64 {
        match self {
            SeriesKind::Bessel => bessel_j0(x),
            SeriesKind::Sine => x.sin(),
            SeriesKind::TwoSine => 0.5 * x.sin() + 0.5 * (2.0 * x).sin(),
            // period-2π triangle wave with sine-like phase and amplitude 1
            SeriesKind::Triangle => std::f64::consts::FRAC_2_PI * x.sin().asin(),
            SeriesKind::DampedCosine => (-x / 10.0).exp() * x.cos(),
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "bessel" => Ok(SeriesKind::Bessel),
            "sine" => Ok(SeriesKind::Sine),
            "two-sine" | "two_sine" => Ok(SeriesKind::TwoSine),
            "triangle" => Ok(SeriesKind::Triangle),
            "damped-cosine" | "damped_cosine" => Ok(SeriesKind::DampedCosine),
            other => Err(Error::invalid(format!("unknown series kind '{other}'"))),
        }
    }
}

impl fmt::Display for SeriesKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SeriesKind::Bessel => "bessel",
            SeriesKind::Sine => "sine",
            SeriesKind::TwoSine => "two-sine",
            SeriesKind::Triangle => "triangle",
            SeriesKind::DampedCosine => "damped-cosine",
        };
        f.write_str(s)
    }
}

/// One training example: `window` consecutive values and the next value as
/// target. `target_index` is the target's position in the full series.
#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    pub input: Vec<f64>,
    pub target: f64,
    pub target_index: usize,
}

/// A generated series with its sliding windows, split into disjoint halves.
#[derive(Debug, Clone)]
pub struct SeriesDataset {
    pub xs: Vec<f64>,
    pub values: Vec<f64>,
    pub window: usize,
    pub train_windows: Vec<Window>,
    pub test_windows: Vec<Window>,
}

/// Sliding windows of `t` consecutive values predicting the following value,
/// stride 1.
pub fn make_windows(values: &[f64], t: usize) -> Result<Vec<Window>> {
    make_windows_offset(values, t, 0)
}

fn make_windows_offset(values: &[f64], t: usize, index_offset: usize) -> Result<Vec<Window>> {
    if t < 1 {
        return Err(Error::invalid("window length must be at least 1"));
    }
    if values.len() < t + 1 {
        return Err(Error::invalid(format!(
            "sequence of length {} too short for window {t}",
            values.len()
        )));
    }
    Ok((0..values.len() - t)
        .map(|i| Window {
            input: values[i..i + t].to_vec(),
            target: values[i + t],
            target_index: index_offset + i + t,
        })
        .collect())
}

/// Generate `n_points` equidistant samples of the chosen function over
/// `x_range` (endpoints inclusive) and window each half separately. The
/// default range [0, 8π] covers four quasi-periods, two per half.
pub fn generate_series(
    kind: SeriesKind,
    n_points: usize,
    x_range: (f64, f64),
    window: usize,
) -> Result<SeriesDataset> {
    if n_points < 2 * window + 2 {
        return Err(Error::invalid(format!(
            "{n_points} points cannot fill two halves of window {window}"
        )));
    }
    if !(x_range.1 > x_range.0) {
        return Err(Error::invalid("x range must be increasing"));
    }
    let dx = (x_range.1 - x_range.0) / (n_points - 1) as f64;
    let xs: Vec<f64> = (0..n_points).map(|i| x_range.0 + i as f64 * dx).collect();
    let values: Vec<f64> = xs.iter().map(|&x| kind.evaluate(x)).collect();
    let split = n_points / 2;
    let train_windows = make_windows_offset(&values[..split], window, 0)?;
    let test_windows = make_windows_offset(&values[split..], window, split)?;
    Ok(SeriesDataset {
        xs,
        values,
        window,
        train_windows,
        test_windows,
    })
}

/// Build a dataset from precomputed values (used when data noise is added to
/// a generated series before windowing).
pub fn dataset_from_values(
    xs: Vec<f64>,
    values: Vec<f64>,
    window: usize,
) -> Result<SeriesDataset> {
    if xs.len() != values.len() {
        return Err(Error::DimensionMismatch {
            expected: xs.len(),
            got: values.len(),
        });
    }
    let split = values.len() / 2;
    let train_windows = make_windows_offset(&values[..split], window, 0)?;
    let test_windows = make_windows_offset(&values[split..], window, split)?;
    Ok(SeriesDataset {
        xs,
        values,
        window,
        train_windows,
        test_windows,
    })
}

/// The trivial predictor: repeat the window's final value.
pub fn repeat_last_baseline(window: &[f64]) -> Result<f64> {
    window
        .last()
        .copied()
        .ok_or_else(|| Error::invalid("empty window"))
}

/// CSV export of a generated series with header `x,value`.
pub fn series_to_csv(ds: &SeriesDataset) -> String {
    let mut out = String::from("x,value\n");
    for (x, v) in ds.xs.iter().zip(&ds.values) {
        out.push_str(&format!("{x},{v}\n"));
    }
    out
}

/// Pixel sequences (49-long, row-major 7×7) with binary labels:
/// 0 for digit '3', 1 for digit '6'.
#[derive(Debug, Clone)]
pub struct ImageDataset {
    pub sequences: Vec<Vec<f64>>,
    pub labels: Vec<u8>,
    /// Number of leading examples forming the training split (80%).
    pub train_len: usize,
    /// Realized (threes, sixes) counts.
    pub class_counts: (usize, usize),
    /// Set when fewer matching images than requested were available.
    pub shortfall_warning: Option<String>,
}

impl ImageDataset {
    pub fn train(&self) -> (&[Vec<f64>], &[u8]) {
        (
            &self.sequences[..self.train_len],
            &self.labels[..self.train_len],
        )
    }

    pub fn test(&self) -> (&[Vec<f64>], &[u8]) {
        (
            &self.sequences[self.train_len..],
            &self.labels[self.train_len..],
        )
    }
}

const IDX_IMAGES_MAGIC: u32 = 0x0000_0803;
const IDX_LABELS_MAGIC: u32 = 0x0000_0801;

fn read_be_u32(bytes: &[u8], pos: usize, what: &str) -> Result<u32> {
    bytes
        .get(pos..pos + 4)
        .map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
        .ok_or_else(|| Error::FormatError(format!("truncated IDX header reading {what}")))
}

/// Parse MNIST-style IDX image/label files, keep digits 3 and 6 (first
/// `limit` matches in file order), normalize to [0,1], mean-pool 28×28 to
/// 7×7, and flatten row-major. First 80% train, last 20% test.
pub fn load_mnist(
    images_path: impl AsRef<Path>,
    labels_path: impl AsRef<Path>,
    limit: usize,
) -> Result<ImageDataset> {
    let img_bytes = std::fs::read(images_path.as_ref())?;
    let lbl_bytes = std::fs::read(labels_path.as_ref())?;

    if read_be_u32(&img_bytes, 0, "image magic")? != IDX_IMAGES_MAGIC {
        return Err(Error::FormatError("bad image file magic".into()));
    }
    if read_be_u32(&lbl_bytes, 0, "label magic")? != IDX_LABELS_MAGIC {
        return Err(Error::FormatError("bad label file magic".into()));
    }
    let n_images = read_be_u32(&img_bytes, 4, "image count")? as usize;
    let rows = read_be_u32(&img_bytes, 8, "row count")? as usize;
    let cols = read_be_u32(&img_bytes, 12, "column count")? as usize;
    let n_labels = read_be_u32(&lbl_bytes, 4, "label count")? as usize;
    if rows != 28 || cols != 28 {
        return Err(Error::FormatError(format!(
            "expected 28x28 images, file declares {rows}x{cols}"
        )));
    }
    if n_images != n_labels {
        return Err(Error::FormatError(format!(
            "{n_images} images but {n_labels} labels"
        )));
    }
    let img_data = &img_bytes[16..];
    let lbl_data = &lbl_bytes[8..];
    if img_data.len() < n_images * 784 || lbl_data.len() < n_labels {
        return Err(Error::FormatError("truncated IDX payload".into()));
    }

    let mut sequences = Vec::new();
    let mut labels = Vec::new();
    let mut threes = 0usize;
    let mut sixes = 0usize;
    for i in 0..n_images {
        let digit = lbl_data[i];
        if digit != 3 && digit != 6 {
            continue;
        }
        let pixels = &img_data[i * 784..(i + 1) * 784];
        sequences.push(pool_28_to_7(pixels));
        if digit == 3 {
            labels.push(0);
            threes += 1;
        } else {
            labels.push(1);
            sixes += 1;
        }
        if sequences.len() == limit {
            break;
        }
    }
    if sequences.is_empty() {
        return Err(Error::FormatError("no images labeled 3 or 6".into()));
    }
    let shortfall_warning = (sequences.len() < limit).then(|| {
        format!(
            "requested {limit} images labeled 3 or 6 but only {} available",
            sequences.len()
        )
    });
    let train_len = sequences.len() * 8 / 10;
    Ok(ImageDataset {
        sequences,
        labels,
        train_len,
        class_counts: (threes, sixes),
        shortfall_warning,
    })
}

/// Normalize to [0,1] and mean-pool non-overlapping 4×4 blocks, row-major.
fn pool_28_to_7(pixels: &[u8]) -> Vec<f64> {
    let mut out = Vec::with_capacity(49);
    for bi in 0..7 {
        for bj in 0..7 {
            let mut sum = 0.0f64;
            for di in 0..4 {
                for dj in 0..4 {
                    sum += pixels[(bi * 4 + di) * 28 + bj * 4 + dj] as f64;
                }
            }
            out.push(sum / (16.0 * 255.0));
        }
    }
    out
}

/// Write an IDX image file (28×28, u8 pixels).
pub fn write_idx_images(path: impl AsRef<Path>, images: &[Vec<u8>]) -> Result<()> {
    let mut bytes = Vec::with_capacity(16 + images.len() * 784);
    bytes.extend_from_slice(&IDX_IMAGES_MAGIC.to_be_bytes());
    bytes.extend_from_slice(&(images.len() as u32).to_be_bytes());
    bytes.extend_from_slice(&28u32.to_be_bytes());
    bytes.extend_from_slice(&28u32.to_be_bytes());
    for img in images {
        if img.len() != 784 {
            return Err(Error::invalid("IDX image must have 784 pixels"));
        }
        bytes.extend_from_slice(img);
    }
    std::fs::write(path, bytes)?;
    Ok(())
}

/// Write an IDX label file.
pub fn write_idx_labels(path: impl AsRef<Path>, labels: &[u8]) -> Result<()> {
    let mut bytes = Vec::with_capacity(8 + labels.len());
    bytes.extend_from_slice(&IDX_LABELS_MAGIC.to_be_bytes());
    bytes.extend_from_slice(&(labels.len() as u32).to_be_bytes());
    bytes.extend_from_slice(labels);
    std::fs::write(path, bytes)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn j0_at_zero_is_one_and_even() {
        assert_eq!(bessel_j0(0.0), 1.0);
        for x in [0.5, 3.7, 15.0, 33.0] {
            assert_eq!(bessel_j0(-x), bessel_j0(x));
        }
    }

    #[test]
    fn j0_first_zero() {
        assert!(bessel_j0(2.404825557695773).abs() < 1e-9);
    }

    #[test]
    fn series_values() {
        assert!((SeriesKind::Sine.evaluate(std::f64::consts::FRAC_PI_2) - 1.0).abs() < 1e-15);
        assert_eq!(SeriesKind::TwoSine.evaluate(0.0), 0.0);
        assert_eq!(SeriesKind::DampedCosine.evaluate(0.0), 1.0);
        // triangle: 0 at 0, 1 at π/2, 0 at π, −1 at 3π/2
        assert!((SeriesKind::Triangle.evaluate(0.0)).abs() < 1e-15);
        assert!((SeriesKind::Triangle.evaluate(std::f64::consts::FRAC_PI_2) - 1.0).abs() < 1e-12);
        assert!((SeriesKind::Triangle.evaluate(std::f64::consts::PI)).abs() < 1e-12);
        assert!(
            (SeriesKind::Triangle.evaluate(4.71238898038469) + 1.0).abs() < 1e-12
        );
        // halfway up the first rising edge the wave is linear
        assert!(
            (SeriesKind::Triangle.evaluate(std::f64::consts::FRAC_PI_4) - 0.5).abs() < 1e-12
        );
    }

    #[test]
    fn windows_basic() {
        let w = make_windows(&[1.0, 2.0, 3.0, 4.0, 5.0], 4).unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].input, vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(w[0].target, 5.0);
        assert!(make_windows(&[1.0, 2.0], 4).is_err());
    }

    #[test]
    fn constant_sequence_targets_constant() {
        let w = make_windows(&[0.3; 10], 4).unwrap();
        assert_eq!(w.len(), 6);
        assert!(w.iter().all(|w| w.target == 0.3));
    }

    #[test]
    fn window_count_for_100_value_half() {
        let ds = generate_series(SeriesKind::Bessel, 200, (0.0, 8.0 * std::f64::consts::PI), 4)
            .unwrap();
        assert_eq!(ds.train_windows.len(), 96);
        assert_eq!(ds.test_windows.len(), 96);
    }

    #[test]
    fn grid_is_equidistant_and_split_disjoint() {
        let ds = generate_series(SeriesKind::Sine, 101, (0.0, 10.0), 4).unwrap();
        let dx = ds.xs[1] - ds.xs[0];
        for pair in ds.xs.windows(2) {
            assert!((pair[1] - pair[0] - dx).abs() < 1e-12);
        }
        let split = ds.values.len() / 2;
        // no training window reaches past the boundary, no test window before it
        for w in &ds.train_windows {
            assert!(w.target_index < split);
        }
        for w in &ds.test_windows {
            assert!(w.target_index - ds.window >= split);
        }
    }

    #[test]
    fn generated_values_bounded() {
        for kind in [
            SeriesKind::Bessel,
            SeriesKind::Sine,
            SeriesKind::TwoSine,
            SeriesKind::Triangle,
            SeriesKind::DampedCosine,
        ] {
            let ds = generate_series(kind, 200, (0.0, 8.0 * std::f64::consts::PI), 4).unwrap();
            assert!(ds.values.iter().all(|v| v.abs() <= 1.0 + 1e-12), "{kind}");
        }
    }

    #[test]
    fn repeat_last() {
        assert_eq!(repeat_last_baseline(&[1.0, 2.0, 3.0, 4.0]).unwrap(), 4.0);
        assert_eq!(repeat_last_baseline(&[0.7, 0.7]).unwrap(), 0.7);
        assert!(repeat_last_baseline(&[]).is_err());
    }

    #[test]
    fn csv_export_has_header() {
        let ds = generate_series(SeriesKind::Sine, 12, (0.0, 1.0), 2).unwrap();
        let csv = series_to_csv(&ds);
        assert!(csv.starts_with("x,value\n"));
        assert_eq!(csv.lines().count(), 13);
    }
}
