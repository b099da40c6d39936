//! Second-order jets: value, gradient, Hessian.

use super::{sym_matrix, wirtinger_grad, JetLike, Smooth};
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// A scalar with exact first and second partial derivatives at a point.
///
/// The Hessian is stored fully but written only through the canonical
/// triangle, so `h[(i, j)]` and `h[(j, i)]` are identical bits.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet2 {
    pub v: f64,
    pub g: DVector<f64>,
    pub h: DMatrix<f64>,
}

impl Jet2 {
    pub fn dim(&self) -> usize {
        self.g.len()
    }

    /// Chain rule through a scalar function with derivative values
    /// `d = [f(v), f'(v), f''(v)]` at the jet's value.
    pub fn compose(&self, d: &[f64; 3]) -> Jet2 {
        let dim = self.dim();
        let g = self.g.map(|gi| d[1] * gi);
        let h = sym_matrix(dim, |i, j| d[1] * self.h[(i, j)] + d[2] * self.g[i] * self.g[j]);
        Jet2 { v: d[0], g, h }
    }

    /// Holomorphic/antiholomorphic derivative pair in coordinate slot `a`.
    pub fn wirtinger(&self, a: usize) -> (Complex64, Complex64) {
        wirtinger_grad(&self.g, a)
    }
}

impl Smooth for Jet2 {
    fn value(&self) -> f64 {
        self.v
    }

    fn constant_like(&self, c: f64) -> Self {
        Jet2::constant(self.dim(), c)
    }

    fn add(&self, rhs: &Self) -> Self {
        Jet2 {
            v: self.v + rhs.v,
            g: &self.g + &rhs.g,
            h: &self.h + &rhs.h,
        }
    }

    fn sub(&self, rhs: &Self) -> Self {
        Jet2 {
            v: self.v - rhs.v,
            g: &self.g - &rhs.g,
            h: &self.h - &rhs.h,
        }
    }

    fn neg(&self) -> Self {
        Jet2 {
            v: -self.v,
            g: -&self.g,
            h: -&self.h,
        }
    }

    fn mul(&self, rhs: &Self) -> Self {
        let dim = self.dim();
        let v = self.v * rhs.v;
        let mut g = DVector::zeros(dim);
        for i in 0..dim {
            g[i] = self.v * rhs.g[i] + rhs.v * self.g[i];
        }
        let h = sym_matrix(dim, |i, j| {
            self.v * rhs.h[(i, j)]
                + rhs.v * self.h[(i, j)]
                + self.g[i] * rhs.g[j]
                + self.g[j] * rhs.g[i]
        });
        Jet2 { v, g, h }
    }

    fn scale(&self, c: f64) -> Self {
        Jet2 {
            v: c * self.v,
            g: self.g.map(|x| c * x),
            h: self.h.map(|x| c * x),
        }
    }

    fn add_scalar(&self, c: f64) -> Self {
        Jet2 {
            v: self.v + c,
            g: self.g.clone(),
            h: self.h.clone(),
        }
    }

    fn recip(&self) -> Result<Self> {
        if self.v == 0.0 {
            return Err(Error::JetDivisionByZero);
        }
        let r = 1.0 / self.v;
        Ok(self.compose(&[r, -r * r, 2.0 * r * r * r]))
    }

    fn exp(&self) -> Self {
        let e = self.v.exp();
        self.compose(&[e, e, e])
    }

    fn ln(&self) -> Result<Self> {
        if self.v <= 0.0 {
            return Err(Error::JetLogDomain { value: self.v });
        }
        let r = 1.0 / self.v;
        Ok(self.compose(&[self.v.ln(), r, -r * r]))
    }

    fn sqrt(&self) -> Result<Self> {
        if self.v <= 0.0 {
            return Err(Error::JetSqrtDomain { value: self.v });
        }
        let s = self.v.sqrt();
        Ok(self.compose(&[s, 0.5 / s, -0.25 / (s * self.v)]))
    }
}

impl JetLike for Jet2 {
    fn constant(dim: usize, c: f64) -> Self {
        Jet2 {
            v: c,
            g: DVector::zeros(dim),
            h: DMatrix::zeros(dim, dim),
        }
    }

    fn seed(dim: usize, index: usize, value: f64) -> Self {
        let mut g = DVector::zeros(dim);
        g[index] = 1.0;
        Jet2 {
            v: value,
            g,
            h: DMatrix::zeros(dim, dim),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() < tol
    }

    #[test]
    fn product_quotient_jet_matches_hand_derivatives() {
        // f = (x y) / w at (x, y, w) = (2, 3, 5), variables 0, 1, 2.
        let x = Jet2::seed(3, 0, 2.0);
        let y = Jet2::seed(3, 1, 3.0);
        let w = Jet2::seed(3, 2, 5.0);
        let f = x.mul(&y).div(&w).unwrap();
        assert!(close(f.v, 1.2, 1e-15));
        assert!(close(f.g[0], 3.0 / 5.0, 1e-14));
        assert!(close(f.g[1], 2.0 / 5.0, 1e-14));
        assert!(close(f.g[2], -6.0 / 25.0, 1e-14));
        assert!(close(f.h[(0, 1)], 1.0 / 5.0, 1e-14));
        assert!(close(f.h[(0, 2)], -3.0 / 25.0, 1e-14));
        assert!(close(f.h[(2, 2)], 12.0 / 125.0, 1e-14));
        assert!(close(f.h[(0, 0)], 0.0, 1e-14));
    }

    #[test]
    fn hessian_is_bitwise_symmetric() {
        let x = Jet2::seed(4, 0, 0.3);
        let y = Jet2::seed(4, 3, 1.7);
        let f = x.mul(&y).exp().mul(&x.add(&y).recip().unwrap());
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(f.h[(i, j)].to_bits(), f.h[(j, i)].to_bits());
            }
        }
    }

    #[test]
    fn sqrt_jet_squares_back() {
        let x = Jet2::seed(2, 0, 2.61);
        let s = x.sqrt().unwrap();
        let back = s.mul(&s);
        assert!(close(back.v, x.v, 1e-13));
        assert!(close(back.g[0], 1.0, 1e-13));
        assert!(close(back.h[(0, 0)], 0.0, 1e-13));
    }
}
