//! Gaussian and Haar-distributed random matrices.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

/// Matrix with i.i.d. standard complex Gaussian entries (E|z|^2 = 1).
pub fn complex_gaussian<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<Complex64> {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    DMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * scale, im * scale)
    })
}

/// Haar-random unitary of size `n`: QR of a complex Gaussian matrix with the
/// phases of diag(R) pushed back into Q.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<Complex64> {
    loop {
        let g = complex_gaussian(n, n, rng);
        let qr = g.qr();
        let r = qr.r();
        let mut q = qr.q();
        let mut degenerate = false;
        for j in 0..n {
            let d = r[(j, j)];
            let norm = d.norm();
            if norm < 1e-300 {
                degenerate = true;
                break;
            }
            let phase = d / norm;
            for i in 0..n {
                q[(i, j)] *= phase;
            }
        }
        if !degenerate {
            return q;
        }
    }
}

pub fn haar_u2<R: Rng + ?Sized>(rng: &mut R) -> Matrix2<Complex64> {
    let u = haar_unitary(2, rng);
    Matrix2::new(u[(0, 0)], u[(0, 1)], u[(1, 0)], u[(1, 1)])
}

/// Uniform element of U(1) embedded as diag(1, e^{i theta}) in U(2).
pub fn haar_u1_in_u2<R: Rng + ?Sized>(rng: &mut R) -> Matrix2<Complex64> {
    let theta: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    Matrix2::new(
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::from_polar(1.0, theta),
    )
}
