//! Hermitian eigenvalues and singular values through realification.
//!
//! A Hermitian H = P + iQ maps to the real symmetric [[P, -Q], [Q, P]],
//! whose spectrum is that of H with every eigenvalue doubled. This keeps
//! all spectral work inside the real symmetric eigensolver.

use crate::error::{Error, Result};
use crate::tol::HERMITIAN_SLACK;
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

/// Maximum deviation |H - H^dagger| over all entries.
pub fn hermitian_deviation(h: &DMatrix<Complex64>) -> f64 {
    let n = h.nrows();
    let mut worst: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            worst = worst.max((h[(a, b)] - h[(b, a)].conj()).norm());
        }
    }
    worst
}

/// [[P, -Q], [Q, P]] for H = P + iQ.
pub fn realify(h: &DMatrix<Complex64>) -> DMatrix<f64> {
    let n = h.nrows();
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for a in 0..n {
        for b in 0..n {
            let p = h[(a, b)].re;
            let q = h[(a, b)].im;
            m[(a, b)] = p;
            m[(n + a, n + b)] = p;
            m[(a, n + b)] = -q;
            m[(n + a, b)] = q;
        }
    }
    m
}

/// Eigenvalues of a Hermitian matrix, ascending. Rejects matrices whose
/// Hermitian deviation exceeds the shared slack; symmetrizes the rest.
pub fn hermitian_eigenvalues(h: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    let dev = hermitian_deviation(h);
    let scale = h.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    if dev > HERMITIAN_SLACK * (1.0 + scale) {
        return Err(Error::NonHermitian(dev));
    }
    let n = h.nrows();
    let sym = DMatrix::from_fn(n, n, |a, b| (h[(a, b)] + h[(b, a)].conj()) * 0.5);
    let real = realify(&sym);
    let real = DMatrix::from_fn(2 * n, 2 * n, |i, j| 0.5 * (real[(i, j)] + real[(j, i)]));
    let eig = SymmetricEigen::new(real);
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // The realified spectrum holds each eigenvalue twice.
    Ok(vals.into_iter().step_by(2).collect())
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(h: &DMatrix<Complex64>) -> Result<f64> {
    Ok(hermitian_eigenvalues(h)?[0])
}

/// Largest eigenvalue of a Hermitian matrix.
pub fn max_eigenvalue(h: &DMatrix<Complex64>) -> Result<f64> {
    Ok(*hermitian_eigenvalues(h)?.last().unwrap())
}

/// Singular values of a complex matrix, descending, via A^dagger A.
pub fn singular_values(a: &DMatrix<Complex64>) -> Vec<f64> {
    let gram = a.adjoint() * a;
    let mut vals = hermitian_eigenvalues(&gram).expect("Gram matrix is Hermitian");
    for v in vals.iter_mut() {
        *v = v.max(0.0).sqrt();
    }
    vals.reverse();
    vals
}
