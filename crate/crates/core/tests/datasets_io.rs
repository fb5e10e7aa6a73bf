//! Dataset tests: Bessel accuracy against a quadrature oracle, IDX parsing,
//! pooling, and windowing properties.

mod common;

use common::*;
use cvqrnn_core::datasets::{
    bessel_j0, generate_series, load_mnist, make_windows, repeat_last_baseline, write_idx_images,
    write_idx_labels, SeriesKind,
};
use cvqrnn_core::Error;
use proptest::prelude::*;

#[test]
fn bessel_matches_quadrature_oracle_up_to_forty() {
    // 1e-10 absolute across the full working range, both branches
    let mut x = 0.0;
    while x <= 40.0 {
        let ours = bessel_j0(x);
        let oracle = bessel_j0_quadrature(x);
        assert!(
            (ours - oracle).abs() < 1e-10,
            "J0({x}): {ours} vs {oracle}"
        );
        x += 0.73;
    }
    // dense sweep around the branch switch
    for k in 0..60 {
        let x = 12.4 + k as f64 * 0.02;
        assert!((bessel_j0(x) - bessel_j0_quadrature(x)).abs() < 1e-10);
    }
}

#[test]
fn idx_round_trip_block_images() {
    // block-constant images survive write → parse → pool exactly
    let dir = std::env::temp_dir().join(format!("cvqrnn_idx_{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let img_path = dir.join("imgs.idx");
    let lbl_path = dir.join("lbls.idx");

    let mut images = Vec::new();
    let mut labels = Vec::new();
    for v in 0..4u8 {
        let mut img = vec![0u8; 784];
        // fill pooled block (2,3) with a constant
        for di in 0..4 {
            for dj in 0..4 {
                img[(2 * 4 + di) * 28 + 3 * 4 + dj] = v * 60;
            }
        }
        images.push(img);
        labels.push(if v % 2 == 0 { 3 } else { 6 });
    }
    write_idx_images(&img_path, &images).unwrap();
    write_idx_labels(&lbl_path, &labels).unwrap();

    let ds = load_mnist(&img_path, &lbl_path, 10).unwrap();
    assert_eq!(ds.sequences.len(), 4);
    assert_eq!(ds.labels, vec![0, 1, 0, 1]);
    assert_eq!(ds.class_counts, (2, 2));
    for (k, seq) in ds.sequences.iter().enumerate() {
        assert_eq!(seq.len(), 49);
        let expected = (k as f64 * 60.0) / 255.0;
        assert!((seq[2 * 7 + 3] - expected).abs() < 1e-12);
        let others: f64 = seq
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != 2 * 7 + 3)
            .map(|(_, v)| v.abs())
            .sum();
        assert_eq!(others, 0.0);
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn single_bright_block_pools_to_exactly_one() {
    let dir = std::env::temp_dir().join(format!("cvqrnn_idx1_{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let img_path = dir.join("imgs.idx");
    let lbl_path = dir.join("lbls.idx");
    let mut img = vec![0u8; 784];
    for di in 0..4 {
        for dj in 0..4 {
            img[di * 28 + dj] = 255;
        }
    }
    write_idx_images(&img_path, &[img]).unwrap();
    write_idx_labels(&lbl_path, &[6]).unwrap();
    let ds = load_mnist(&img_path, &lbl_path, 5).unwrap();
    assert_eq!(ds.sequences[0][0], 1.0);
    assert_eq!(ds.sequences[0].iter().filter(|v| **v != 0.0).count(), 1);
    assert_eq!(ds.labels, vec![1]);
    assert!(ds.shortfall_warning.is_some());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn bad_magic_and_truncation_are_format_errors() {
    let dir = std::env::temp_dir().join(format!("cvqrnn_idx2_{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let img_path = dir.join("imgs.idx");
    let lbl_path = dir.join("lbls.idx");

    std::fs::write(&img_path, [0u8, 0, 8, 1, 0, 0, 0, 0]).unwrap();
    write_idx_labels(&lbl_path, &[3]).unwrap();
    match load_mnist(&img_path, &lbl_path, 5) {
        Err(Error::FormatError(_)) => {}
        other => panic!("expected format error, got {other:?}"),
    }

    // valid header claiming one image but no payload
    let mut header = Vec::new();
    header.extend_from_slice(&0x0000_0803u32.to_be_bytes());
    header.extend_from_slice(&1u32.to_be_bytes());
    header.extend_from_slice(&28u32.to_be_bytes());
    header.extend_from_slice(&28u32.to_be_bytes());
    std::fs::write(&img_path, &header).unwrap();
    match load_mnist(&img_path, &lbl_path, 5) {
        Err(Error::FormatError(_)) => {}
        other => panic!("expected format error, got {other:?}"),
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn filters_to_threes_and_sixes_in_file_order() {
    let dir = std::env::temp_dir().join(format!("cvqrnn_idx3_{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let img_path = dir.join("imgs.idx");
    let lbl_path = dir.join("lbls.idx");
    let blank = vec![0u8; 784];
    let labels = [1u8, 3, 5, 6, 3, 7, 6, 0];
    write_idx_images(&img_path, &vec![blank; labels.len()]).unwrap();
    write_idx_labels(&lbl_path, &labels).unwrap();
    let ds = load_mnist(&img_path, &lbl_path, 3).unwrap();
    // first three matches in order: 3, 6, 3 → classes 0, 1, 0
    assert_eq!(ds.labels, vec![0, 1, 0]);
    assert!(ds.shortfall_warning.is_none());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn synthetic_digits_have_distinct_pooled_mass() {
    // glyph sanity: the two classes must differ systematically after pooling
    let (images, labels) = synthetic_digit_set(40, 7);
    let dir = std::env::temp_dir().join(format!("cvqrnn_idx4_{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let img_path = dir.join("imgs.idx");
    let lbl_path = dir.join("lbls.idx");
    write_idx_images(&img_path, &images).unwrap();
    write_idx_labels(&lbl_path, &labels).unwrap();
    let ds = load_mnist(&img_path, &lbl_path, 40).unwrap();
    assert_eq!(ds.class_counts, (20, 20));
    // mean bottom-left-quadrant mass separates sixes (loop) from threes
    let mut mass = [0.0f64; 2];
    let mut count = [0usize; 2];
    for (seq, &label) in ds.sequences.iter().zip(&ds.labels) {
        let m: f64 = (4..7)
            .flat_map(|i| (0..3).map(move |j| (i, j)))
            .map(|(i, j)| seq[i * 7 + j])
            .sum();
        mass[label as usize] += m;
        count[label as usize] += 1;
    }
    let m3 = mass[0] / count[0] as f64;
    let m6 = mass[1] / count[1] as f64;
    assert!(
        m6 > m3 + 0.3,
        "six lower-left mass {m6} should exceed three's {m3}"
    );
    std::fs::remove_dir_all(&dir).ok();
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn window_count_and_contiguity(len in 5usize..60, t in 1usize..4) {
        prop_assume!(len > t);
        let values: Vec<f64> = (0..len).map(|i| (i as f64 * 0.37).sin()).collect();
        let windows = make_windows(&values, t).unwrap();
        prop_assert_eq!(windows.len(), len - t);
        for (i, w) in windows.iter().enumerate() {
            prop_assert_eq!(w.input.len(), t);
            prop_assert_eq!(w.input[0], values[i]);
            prop_assert_eq!(w.target, values[i + t]);
            prop_assert_eq!(w.target_index, i + t);
        }
    }

    #[test]
    fn repeat_last_is_final_element(values in prop::collection::vec(-1.0f64..1.0, 1..20)) {
        prop_assert_eq!(repeat_last_baseline(&values).unwrap(), *values.last().unwrap());
    }

    #[test]
    fn series_split_halves_are_disjoint(n in 24usize..120, t in 2usize..6) {
        prop_assume!(n >= 2 * t + 2 && n >= 2 * (t + 1));
        let ds = generate_series(SeriesKind::TwoSine, n, (0.0, 20.0), t).unwrap();
        let split = n / 2;
        for w in &ds.train_windows {
            prop_assert!(w.target_index < split);
        }
        for w in &ds.test_windows {
            prop_assert!(w.target_index >= split + t);
        }
    }
}
