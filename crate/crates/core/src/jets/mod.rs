//! Forward-mode jet arithmetic over 2n real coordinates.
//!
//! Coordinates are interleaved: real index 2a is x_a, index 2a+1 is y_a,
//! with z_a = x_a + i y_a. [`Jet2`] carries value, gradient, and Hessian;
//! [`Jet3`] adds the full third-derivative cube. [`CJet`] wraps a pair of
//! jets into a complex scalar. Hessians and third tensors are computed on
//! a canonical index triangle and mirrored, so stored symmetry is exact
//! to the bit, not merely up to rounding. Several verification residuals
//! cancel exactly only because of that discipline.

mod complex;
mod jet2;
mod jet3;

pub use complex::CJet;
pub use jet2::Jet2;
pub use jet3::Jet3;

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Scalar types supporting smooth arithmetic: plain values and jets.
///
/// `recip`, `div`, `ln`, `sqrt` are fallible because their domains are
/// restricted; the same formula code then runs identically on `f64`
/// (values only) and on jets (values plus derivatives).
pub trait Smooth: Clone {
    fn value(&self) -> f64;
    /// A constant with the same variable layout as `self`.
    fn constant_like(&self, c: f64) -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn scale(&self, c: f64) -> Self;
    fn add_scalar(&self, c: f64) -> Self;
    fn recip(&self) -> Result<Self>;
    fn exp(&self) -> Self;
    fn ln(&self) -> Result<Self>;
    fn sqrt(&self) -> Result<Self>;
    fn div(&self, rhs: &Self) -> Result<Self> {
        Ok(self.mul(&rhs.recip()?))
    }
}

/// Scalars that can be seeded as coordinates of a jet space.
pub trait JetLike: Smooth {
    fn constant(dim: usize, c: f64) -> Self;
    /// The coordinate function x_index evaluated at `value`.
    fn seed(dim: usize, index: usize, value: f64) -> Self;
}

impl Smooth for f64 {
    fn value(&self) -> f64 {
        *self
    }
    fn constant_like(&self, c: f64) -> Self {
        c
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn scale(&self, c: f64) -> Self {
        self * c
    }
    fn add_scalar(&self, c: f64) -> Self {
        self + c
    }
    fn recip(&self) -> Result<Self> {
        if *self == 0.0 {
            return Err(Error::JetDivisionByZero);
        }
        Ok(1.0 / self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn ln(&self) -> Result<Self> {
        if *self <= 0.0 {
            return Err(Error::JetLogDomain { value: *self });
        }
        Ok(f64::ln(*self))
    }
    fn sqrt(&self) -> Result<Self> {
        if *self <= 0.0 {
            return Err(Error::JetSqrtDomain { value: *self });
        }
        Ok(f64::sqrt(*self))
    }
}

impl JetLike for f64 {
    fn constant(_dim: usize, c: f64) -> Self {
        c
    }
    fn seed(_dim: usize, _index: usize, value: f64) -> Self {
        value
    }
}

/// Builds a bitwise-symmetric matrix from values on the triangle i <= j.
pub(crate) fn sym_matrix(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in i..dim {
            let v = f(i, j);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

#[inline]
pub(crate) fn cube_index(dim: usize, i: usize, j: usize, k: usize) -> usize {
    (i * dim + j) * dim + k
}

/// Builds a bitwise-symmetric rank-3 cube from values on i <= j <= k.
pub(crate) fn sym_cube(dim: usize, mut f: impl FnMut(usize, usize, usize) -> f64) -> Vec<f64> {
    let mut t = vec![0.0; dim * dim * dim];
    for i in 0..dim {
        for j in i..dim {
            for k in j..dim {
                let v = f(i, j, k);
                for (a, b, c) in [
                    (i, j, k),
                    (i, k, j),
                    (j, i, k),
                    (j, k, i),
                    (k, i, j),
                    (k, j, i),
                ] {
                    t[cube_index(dim, a, b, c)] = v;
                }
            }
        }
    }
    t
}

/// Holomorphic and antiholomorphic first derivatives of a real scalar:
/// d/dz_a = (d/dx_a - i d/dy_a)/2 applied to the gradient of `grad`.
pub fn wirtinger_grad(grad: &DVector<f64>, a: usize) -> (Complex64, Complex64) {
    let gx = grad[2 * a];
    let gy = grad[2 * a + 1];
    (
        Complex64::new(0.5 * gx, -0.5 * gy),
        Complex64::new(0.5 * gx, 0.5 * gy),
    )
}

/// Second-order chain rule for a scalar outer function given by value,
/// gradient, and symmetric Hessian in the outer variables, composed with
/// inner jets (one per outer variable) over shared inner coordinates.
pub fn compose_multi2(value: f64, grad: &DVector<f64>, hess: &DMatrix<f64>, inner: &[Jet2]) -> Jet2 {
    let m = inner.len();
    assert_eq!(grad.len(), m);
    assert_eq!(hess.nrows(), m);
    let dim = inner[0].dim();
    let mut g = DVector::zeros(dim);
    for i in 0..dim {
        let mut s = 0.0;
        for a in 0..m {
            s += grad[a] * inner[a].g[i];
        }
        g[i] = s;
    }
    let h = sym_matrix(dim, |i, j| {
        let mut s = 0.0;
        for a in 0..m {
            for b in 0..m {
                s += hess[(a, b)] * inner[a].g[i] * inner[b].g[j];
            }
        }
        for a in 0..m {
            s += grad[a] * inner[a].h[(i, j)];
        }
        s
    });
    Jet2 { v: value, g, h }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_of_seed_has_textbook_derivatives() {
        let x = Jet2::seed(2, 0, 3.0);
        let s = x.mul(&x);
        assert_eq!(s.v, 9.0);
        assert_eq!(s.g[0], 6.0);
        assert_eq!(s.h[(0, 0)], 2.0);
        assert_eq!(s.g[1], 0.0);
    }

    #[test]
    fn adding_zero_is_identity() {
        let x = Jet2::seed(2, 0, 1.25);
        let z = x.constant_like(0.0);
        let s = x.add(&z);
        assert_eq!(s, x);
    }

    #[test]
    fn exp_at_zero_has_unit_jet() {
        let x = Jet2::seed(2, 0, 0.0);
        let e = x.exp();
        assert_eq!(e.v, 1.0);
        assert_eq!(e.g[0], 1.0);
        assert_eq!(e.h[(0, 0)], 1.0);
    }

    #[test]
    fn log_inverts_exp() {
        let mut x = Jet2::seed(4, 1, 0.7);
        x.g[2] = 0.3;
        x.h[(0, 3)] = 0.1;
        x.h[(3, 0)] = 0.1;
        let back = x.exp().ln().unwrap();
        assert!((back.v - x.v).abs() < 1e-12);
        for i in 0..4 {
            assert!((back.g[i] - x.g[i]).abs() < 1e-12);
            for j in 0..4 {
                assert!((back.h[(i, j)] - x.h[(i, j)]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn log_of_nonpositive_value_is_rejected() {
        let x = Jet2::seed(2, 0, -1.0);
        assert!(matches!(x.ln(), Err(Error::JetLogDomain { .. })));
    }

    #[test]
    fn division_by_zero_valued_jet_is_rejected() {
        let x = Jet2::seed(2, 0, 1.0);
        let z = Jet2::seed(2, 1, 0.0);
        assert!(matches!(x.div(&z), Err(Error::JetDivisionByZero)));
    }

    #[test]
    fn wirtinger_of_re_z1() {
        // Re z_1 = x_1: dz = 1/2, dzbar = 1/2.
        let j = Jet2::seed(4, 0, 0.4);
        let (dz, dzbar) = j.wirtinger(0);
        assert_eq!(dz, Complex64::new(0.5, 0.0));
        assert_eq!(dzbar, Complex64::new(0.5, 0.0));
    }

    #[test]
    fn wirtinger_of_mod_squared() {
        // |z_1|^2 at z_1 = c: dz = conj(c), dzbar = c.
        let (cx, cy) = (0.3, -0.8);
        let x = Jet2::seed(2, 0, cx);
        let y = Jet2::seed(2, 1, cy);
        let m = x.mul(&x).add(&y.mul(&y));
        let (dz, dzbar) = m.wirtinger(0);
        assert!((dz - Complex64::new(cx, -cy)).norm() < 1e-14);
        assert!((dzbar - Complex64::new(cx, cy)).norm() < 1e-14);
    }

    #[test]
    fn wirtinger_of_real_jet_conjugate_pair() {
        let x = Jet2::seed(2, 0, 0.5);
        let y = Jet2::seed(2, 1, 1.5);
        let f = x.mul(&y).add(&x.exp());
        let (dz, dzbar) = f.wirtinger(0);
        assert_eq!(dzbar, dz.conj());
    }

    #[test]
    fn multivariate_compose_matches_direct_composition() {
        // Outer f(a, b) = a^2 b + b, inner a = x0 x1, b = x0 + 2 x1.
        let (x0, x1) = (0.7, -0.4);
        let a = Jet2::seed(2, 0, x0).mul(&Jet2::seed(2, 1, x1));
        let b = Jet2::seed(2, 0, x0).add(&Jet2::seed(2, 1, x1).scale(2.0));
        let (av, bv) = (a.v, b.v);
        let value = av * av * bv + bv;
        let grad = DVector::from_vec(vec![2.0 * av * bv, av * av + 1.0]);
        let hess = DMatrix::from_row_slice(2, 2, &[2.0 * bv, 2.0 * av, 2.0 * av, 0.0]);
        let composed = compose_multi2(value, &grad, &hess, &[a.clone(), b.clone()]);

        let direct = a.mul(&a).mul(&b).add(&b);
        assert!((composed.v - direct.v).abs() < 1e-13);
        for i in 0..2 {
            assert!((composed.g[i] - direct.g[i]).abs() < 1e-12);
            for j in 0..2 {
                assert!((composed.h[(i, j)] - direct.h[(i, j)]).abs() < 1e-12);
            }
        }
    }
}
