//! Third-order jets: value, gradient, Hessian, third-derivative cube.

use super::{cube_index, sym_cube, sym_matrix, JetLike, Smooth};
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// A scalar with exact partial derivatives up to order three.
///
/// The cube `t` stores all dim^3 entries, written through the canonical
/// triangle i <= j <= k and mirrored, so every permutation of an index
/// triple reads identical bits. Exterior-derivative cancellations in the
/// curvature checks rely on that exactness.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet3 {
    pub v: f64,
    pub g: DVector<f64>,
    pub h: DMatrix<f64>,
    pub t: Vec<f64>,
}

impl Jet3 {
    pub fn dim(&self) -> usize {
        self.g.len()
    }

    #[inline]
    pub fn third(&self, i: usize, j: usize, k: usize) -> f64 {
        self.t[cube_index(self.dim(), i, j, k)]
    }

    /// Chain rule through a scalar function with derivative values
    /// `d = [f(v), f'(v), f''(v), f'''(v)]` at the jet's value.
    pub fn compose(&self, d: &[f64; 4]) -> Jet3 {
        let dim = self.dim();
        let g = self.g.map(|gi| d[1] * gi);
        let h = sym_matrix(dim, |i, j| d[1] * self.h[(i, j)] + d[2] * self.g[i] * self.g[j]);
        let t = sym_cube(dim, |i, j, k| {
            d[1] * self.third(i, j, k)
                + d[2]
                    * (self.g[i] * self.h[(j, k)]
                        + self.g[j] * self.h[(i, k)]
                        + self.g[k] * self.h[(i, j)])
                + d[3] * self.g[i] * self.g[j] * self.g[k]
        });
        Jet3 { v: d[0], g, h, t }
    }
}

impl Smooth for Jet3 {
    fn value(&self) -> f64 {
        self.v
    }

    fn constant_like(&self, c: f64) -> Self {
        Jet3::constant(self.dim(), c)
    }

    fn add(&self, rhs: &Self) -> Self {
        Jet3 {
            v: self.v + rhs.v,
            g: &self.g + &rhs.g,
            h: &self.h + &rhs.h,
            t: self
                .t
                .iter()
                .zip(&rhs.t)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    fn sub(&self, rhs: &Self) -> Self {
        Jet3 {
            v: self.v - rhs.v,
            g: &self.g - &rhs.g,
            h: &self.h - &rhs.h,
            t: self
                .t
                .iter()
                .zip(&rhs.t)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    fn neg(&self) -> Self {
        Jet3 {
            v: -self.v,
            g: -&self.g,
            h: -&self.h,
            t: self.t.iter().map(|a| -a).collect(),
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
        let t = sym_cube(dim, |i, j, k| {
            self.v * rhs.third(i, j, k)
                + rhs.v * self.third(i, j, k)
                + self.g[i] * rhs.h[(j, k)]
                + self.g[j] * rhs.h[(i, k)]
                + self.g[k] * rhs.h[(i, j)]
                + rhs.g[i] * self.h[(j, k)]
                + rhs.g[j] * self.h[(i, k)]
                + rhs.g[k] * self.h[(i, j)]
        });
        Jet3 { v, g, h, t }
    }

    fn scale(&self, c: f64) -> Self {
        Jet3 {
            v: c * self.v,
            g: self.g.map(|x| c * x),
            h: self.h.map(|x| c * x),
            t: self.t.iter().map(|x| c * x).collect(),
        }
    }

    fn add_scalar(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.v += c;
        out
    }

    fn recip(&self) -> Result<Self> {
        if self.v == 0.0 {
            return Err(Error::JetDivisionByZero);
        }
        let r = 1.0 / self.v;
        let r2 = r * r;
        Ok(self.compose(&[r, -r2, 2.0 * r2 * r, -6.0 * r2 * r2]))
    }

    fn exp(&self) -> Self {
        let e = self.v.exp();
        self.compose(&[e, e, e, e])
    }

    fn ln(&self) -> Result<Self> {
        if self.v <= 0.0 {
            return Err(Error::JetLogDomain { value: self.v });
        }
        let r = 1.0 / self.v;
        let r2 = r * r;
        Ok(self.compose(&[self.v.ln(), r, -r2, 2.0 * r2 * r]))
    }

    fn sqrt(&self) -> Result<Self> {
        if self.v <= 0.0 {
            return Err(Error::JetSqrtDomain { value: self.v });
        }
        let s = self.v.sqrt();
        Ok(self.compose(&[
            s,
            0.5 / s,
            -0.25 / (s * self.v),
            0.375 / (s * self.v * self.v),
        ]))
    }
}

impl JetLike for Jet3 {
    fn constant(dim: usize, c: f64) -> Self {
        Jet3 {
            v: c,
            g: DVector::zeros(dim),
            h: DMatrix::zeros(dim, dim),
            t: vec![0.0; dim * dim * dim],
        }
    }

    fn seed(dim: usize, index: usize, value: f64) -> Self {
        let mut g = DVector::zeros(dim);
        g[index] = 1.0;
        Jet3 {
            v: value,
            g,
            h: DMatrix::zeros(dim, dim),
            t: vec![0.0; dim * dim * dim],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_of_seed_has_constant_third_derivative() {
        let x = Jet3::seed(2, 0, 1.5);
        let c = x.mul(&x).mul(&x);
        assert!((c.v - 3.375).abs() < 1e-15);
        assert!((c.g[0] - 6.75).abs() < 1e-14);
        assert!((c.h[(0, 0)] - 9.0).abs() < 1e-14);
        assert!((c.third(0, 0, 0) - 6.0).abs() < 1e-14);
        assert_eq!(c.third(0, 0, 1), 0.0);
    }

    #[test]
    fn mixed_cubic_third_derivative() {
        // x^2 y: d^3/dx^2 dy = 2 everywhere.
        let x = Jet3::seed(2, 0, 0.4);
        let y = Jet3::seed(2, 1, -1.1);
        let f = x.mul(&x).mul(&y);
        assert!((f.third(0, 0, 1) - 2.0).abs() < 1e-14);
        assert_eq!(
            f.third(0, 1, 0).to_bits(),
            f.third(0, 0, 1).to_bits()
        );
        assert_eq!(
            f.third(1, 0, 0).to_bits(),
            f.third(0, 0, 1).to_bits()
        );
    }

    #[test]
    fn ln_third_derivative_closed_form() {
        // (ln v)''' = 2 / v^3.
        let v = 0.73;
        let x = Jet3::seed(1, 0, v);
        let f = x.ln().unwrap();
        assert!((f.third(0, 0, 0) - 2.0 / (v * v * v)).abs() < 1e-12);
    }

    #[test]
    fn composite_third_tensor_is_bitwise_symmetric() {
        let x = Jet3::seed(3, 0, 0.9);
        let y = Jet3::seed(3, 1, -0.2);
        let w = Jet3::seed(3, 2, 1.3);
        let f = x
            .mul(&y)
            .add(&w.mul(&w))
            .exp()
            .recip()
            .unwrap()
            .mul(&x.add(&w));
        let dim = 3;
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    let a = f.third(i, j, k).to_bits();
                    assert_eq!(a, f.third(j, i, k).to_bits());
                    assert_eq!(a, f.third(k, j, i).to_bits());
                    assert_eq!(a, f.third(i, k, j).to_bits());
                }
            }
        }
    }
}
