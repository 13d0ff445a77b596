use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rustfft::FftPlanner;

#[test]
fn complex_svd_minimum_norm_solve() {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    // 3x2 overdetermined system with known least-squares solution.
    let a = DMatrix::from_row_slice(
        3,
        2,
        &[
            c(1.0, 0.0),
            c(0.0, 1.0),
            c(0.0, -1.0),
            c(2.0, 0.0),
            c(1.0, 1.0),
            c(0.5, 0.0),
        ],
    );
    let b = DVector::from_row_slice(&[c(1.0, 0.0), c(0.0, 0.0), c(1.0, -1.0)]);
    let svd = a.clone().svd(true, true);
    let x = svd.solve(&b, 1e-12).expect("svd solve");
    let r = &a * &x - &b;
    let grad = a.adjoint() * r;
    assert!(grad.norm() < 1e-10, "normal equations residual {}", grad.norm());
}

#[test]
fn hermitian_eigendecomposition() {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let m = DMatrix::from_row_slice(
        2,
        2,
        &[c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(3.0, 0.0)],
    );
    let eig = m.clone().symmetric_eigen();
    // Eigenvalues of [[2, i], [-i, 3]] are (5 +- sqrt(5)) / 2.
    let mut vals: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
    vals.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let lo = (5.0 - 5.0_f64.sqrt()) / 2.0;
    let hi = (5.0 + 5.0_f64.sqrt()) / 2.0;
    assert!((vals[0] - lo).abs() < 1e-12 && (vals[1] - hi).abs() < 1e-12);
    // Reconstruction.
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|v| Complex64::new(v, 0.0)));
    let rec = &eig.eigenvectors * d * eig.eigenvectors.adjoint();
    assert!((rec - m).norm() < 1e-12);
}

#[test]
fn fft_roundtrip_shares_complex_type() {
    let n = 16usize;
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mut buf: Vec<Complex64> = (0..n)
        .map(|j| Complex64::new((j as f64).sin(), (j as f64).cos()))
        .collect();
    let orig = buf.clone();
    fwd.process(&mut buf);
    inv.process(&mut buf);
    for (x, y) in buf.iter().zip(orig.iter()) {
        assert!((x / n as f64 - y).norm() < 1e-12);
    }
}
