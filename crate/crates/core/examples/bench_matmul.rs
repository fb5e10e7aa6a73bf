use cvqrnn_core::linalg::ComplexMatrix;
use ndarray::Array2;
use num_complex::Complex64;
use std::time::Instant;

fn mk(n: usize, m: usize) -> ComplexMatrix {
    Array2::from_shape_fn((n, m), |(i, j)| {
        Complex64::new(((i * 7 + j) % 13) as f64 * 0.01, ((i + j * 3) % 11) as f64 * 0.01)
    })
}

fn main() {
    // ndarray dot at the two hot sizes
    for &(a, b, c) in &[(216usize, 216usize, 216usize), (216, 36, 36), (36, 216, 36), (36, 36, 36)] {
        let x = mk(a, b);
        let y = mk(b, c);
        let reps = (2e8 / (a * b * c) as f64).max(3.0) as usize;
        let t = Instant::now();
        let mut acc = Complex64::new(0.0, 0.0);
        for _ in 0..reps {
            let z = x.dot(&y);
            acc += z[(0, 0)];
        }
        let dt = t.elapsed().as_secs_f64();
        let cmul = (a * b * c * reps) as f64;
        println!("dot {a}x{b}x{c}: {:.3} Gcmul/s ({} reps, {acc})", cmul / dt / 1e9, reps);
    }
    // scalar triple loop for comparison
    let n = 216;
    let x = mk(n, n);
    let y = mk(n, n);
    let xf = x.as_slice().unwrap();
    let yf = y.as_slice().unwrap();
    let t = Instant::now();
    let reps = 20;
    let mut sink = Complex64::new(0.0, 0.0);
    for _ in 0..reps {
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for k in 0..n {
                let v = xf[i * n + k];
                let yrow = &yf[k * n..(k + 1) * n];
                let orow = &mut out[i * n..(i + 1) * n];
                for (o, yy) in orow.iter_mut().zip(yrow) {
                    *o += v * *yy;
                }
            }
        }
        sink += out[0];
    }
    let dt = t.elapsed().as_secs_f64();
    println!("scalar ikj 216: {:.3} Gcmul/s ({sink})", (n * n * n * reps) as f64 / dt / 1e9);
}
