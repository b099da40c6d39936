//! Independent oracles for the integration suite: finite differences
//! with Richardson extrapolation, closed-form eigenvalues for small
//! Hermitian matrices, and a from-scratch Hermitian pairing. None of
//! this calls the differentiation machinery under test.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

fn central_grad<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64], h: f64) -> Vec<f64> {
    (0..x.len())
        .map(|i| {
            let mut p = x.to_vec();
            let mut m = x.to_vec();
            p[i] += h;
            m[i] -= h;
            (f(&p) - f(&m)) / (2.0 * h)
        })
        .collect()
}

/// Gradient by central differences at steps h and h/2, combined with
/// one Richardson step to cancel the leading error term.
pub fn fd_grad<F: Fn(&[f64]) -> f64>(f: F, x: &[f64], h: f64) -> Vec<f64> {
    let coarse = central_grad(&f, x, h);
    let fine = central_grad(&f, x, h / 2.0);
    coarse
        .iter()
        .zip(&fine)
        .map(|(c, fi)| (4.0 * fi - c) / 3.0)
        .collect()
}

fn central_hess<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64], h: f64) -> DMatrix<f64> {
    let dim = x.len();
    let shift = |steps: &[(usize, f64)]| {
        let mut p = x.to_vec();
        for &(i, s) in steps {
            p[i] += s;
        }
        f(&p)
    };
    DMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            (shift(&[(i, h)]) - 2.0 * f(x) + shift(&[(i, -h)])) / (h * h)
        } else {
            (shift(&[(i, h), (j, h)]) - shift(&[(i, h), (j, -h)])
                - shift(&[(i, -h), (j, h)])
                + shift(&[(i, -h), (j, -h)]))
                / (4.0 * h * h)
        }
    })
}

pub fn fd_hess<F: Fn(&[f64]) -> f64>(f: F, x: &[f64], h: f64) -> DMatrix<f64> {
    let coarse = central_hess(&f, x, h);
    let fine = central_hess(&f, x, h / 2.0);
    DMatrix::from_fn(x.len(), x.len(), |i, j| {
        (4.0 * fine[(i, j)] - coarse[(i, j)]) / 3.0
    })
}

/// Eigenvalues of a 2 by 2 Hermitian matrix in closed form, ascending.
pub fn herm2_eigenvalues(m: &DMatrix<Complex64>) -> [f64; 2] {
    assert_eq!(m.nrows(), 2);
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let mean = 0.5 * (a + d);
    let radius = (0.25 * (a - d) * (a - d) + m[(0, 1)].norm_sqr()).sqrt();
    [mean - radius, mean + radius]
}

/// Eigenvalues of a 3 by 3 Hermitian matrix via the trigonometric
/// solution of its characteristic cubic, ascending.
pub fn herm3_eigenvalues(m: &DMatrix<Complex64>) -> [f64; 3] {
    assert_eq!(m.nrows(), 3);
    let p1 = (m[(0, 0)] + m[(1, 1)] + m[(2, 2)]).re;
    let minor = |i: usize, j: usize| -> f64 {
        (m[(i, i)] * m[(j, j)] - m[(i, j)] * m[(j, i)]).re
    };
    let p2 = minor(0, 1) + minor(0, 2) + minor(1, 2);
    let det = m[(0, 0)] * (m[(1, 1)] * m[(2, 2)] - m[(1, 2)] * m[(2, 1)])
        - m[(0, 1)] * (m[(1, 0)] * m[(2, 2)] - m[(1, 2)] * m[(2, 0)])
        + m[(0, 2)] * (m[(1, 0)] * m[(2, 1)] - m[(1, 1)] * m[(2, 0)]);
    let p3 = det.re;
    // Substituting lambda = t + tr/3 leaves t^3 + p t + q0 = 0 with
    // p = p2 - tr^2/3 (nonpositive for Hermitian input) and
    // q0 = -2 s^3 + p2 s - p3 where s = tr/3.
    let s = p1 / 3.0;
    let p = p2 - 3.0 * s * s;
    let q0 = -2.0 * s * s * s + p2 * s - p3;
    if p >= -1e-300 {
        return [s, s, s];
    }
    let amp = (-p / 3.0).sqrt();
    // t = 2 amp cos(phi) turns the cubic into cos(3 phi) = -q0/(2 amp^3).
    let cos3 = (-q0 / (2.0 * amp * amp * amp)).clamp(-1.0, 1.0);
    let phi = cos3.acos() / 3.0;
    let third = 2.0 * std::f64::consts::PI / 3.0;
    let mut out = [
        s + 2.0 * amp * phi.cos(),
        s + 2.0 * amp * (phi - third).cos(),
        s + 2.0 * amp * (phi + third).cos(),
    ];
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out
}

/// Hermitian pairing evaluated by explicit loops over complexified
/// components: 2 Re sum H_ab vhat_a conj(vhat_b).
pub fn pairing_oracle(h: &DMatrix<Complex64>, v: &DVector<f64>) -> f64 {
    let n = h.nrows();
    assert_eq!(v.len(), 2 * n);
    let mut acc = Complex64::new(0.0, 0.0);
    for a in 0..n {
        let va = Complex64::new(v[2 * a], v[2 * a + 1]);
        for b in 0..n {
            let vb = Complex64::new(v[2 * b], v[2 * b + 1]);
            acc += h[(a, b)] * va * vb.conj();
        }
    }
    2.0 * acc.re
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}
