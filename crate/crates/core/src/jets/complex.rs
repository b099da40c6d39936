//! Complex scalars built from a pair of smooth real scalars.

use super::{JetLike, Smooth};
use crate::error::Result;
use num_complex::Complex64;
use std::ops::{Add, Mul, Neg, Sub};

/// A complex value whose real and imaginary parts carry derivatives.
#[derive(Clone, Debug)]
pub struct CJet<S: Smooth> {
    pub re: S,
    pub im: S,
}

impl<S: Smooth> CJet<S> {
    pub fn new(re: S, im: S) -> Self {
        CJet { re, im }
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }

    pub fn constant_like(&self, c: Complex64) -> Self {
        CJet {
            re: self.re.constant_like(c.re),
            im: self.im.constant_like(c.im),
        }
    }

    pub fn conj(&self) -> Self {
        CJet {
            re: self.re.clone(),
            im: self.im.neg(),
        }
    }

    /// |z|^2 as a real scalar.
    pub fn modsq(&self) -> S {
        self.re.mul(&self.re).add(&self.im.mul(&self.im))
    }

    pub fn scale(&self, c: f64) -> Self {
        CJet {
            re: self.re.scale(c),
            im: self.im.scale(c),
        }
    }

    pub fn mul_real(&self, s: &S) -> Self {
        CJet {
            re: self.re.mul(s),
            im: self.im.mul(s),
        }
    }

    pub fn add_complex(&self, c: Complex64) -> Self {
        CJet {
            re: self.re.add_scalar(c.re),
            im: self.im.add_scalar(c.im),
        }
    }

    pub fn recip(&self) -> Result<Self> {
        let d = self.modsq().recip()?;
        Ok(CJet {
            re: self.re.mul(&d),
            im: self.im.neg().mul(&d),
        })
    }

    pub fn div(&self, rhs: &Self) -> Result<Self> {
        Ok(self * &rhs.recip()?)
    }
}

impl<S: JetLike> CJet<S> {
    /// Seeds complex coordinate slot `a` (real indices 2a, 2a+1) at `z`.
    pub fn seed_slot(dim: usize, a: usize, z: Complex64) -> Self {
        CJet {
            re: S::seed(dim, 2 * a, z.re),
            im: S::seed(dim, 2 * a + 1, z.im),
        }
    }

    pub fn constant(dim: usize, c: Complex64) -> Self {
        CJet {
            re: S::constant(dim, c.re),
            im: S::constant(dim, c.im),
        }
    }
}

impl<S: Smooth> Add for &CJet<S> {
    type Output = CJet<S>;
    fn add(self, rhs: Self) -> CJet<S> {
        CJet {
            re: self.re.add(&rhs.re),
            im: self.im.add(&rhs.im),
        }
    }
}

impl<S: Smooth> Sub for &CJet<S> {
    type Output = CJet<S>;
    fn sub(self, rhs: Self) -> CJet<S> {
        CJet {
            re: self.re.sub(&rhs.re),
            im: self.im.sub(&rhs.im),
        }
    }
}

impl<S: Smooth> Mul for &CJet<S> {
    type Output = CJet<S>;
    fn mul(self, rhs: Self) -> CJet<S> {
        CJet {
            re: self.re.mul(&rhs.re).sub(&self.im.mul(&rhs.im)),
            im: self.re.mul(&rhs.im).add(&self.im.mul(&rhs.re)),
        }
    }
}

impl<S: Smooth> Neg for &CJet<S> {
    type Output = CJet<S>;
    fn neg(self) -> CJet<S> {
        CJet {
            re: self.re.neg(),
            im: self.im.neg(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::Jet2;

    #[test]
    fn complex_product_matches_value_arithmetic() {
        let a = CJet::<Jet2>::seed_slot(4, 0, Complex64::new(1.2, -0.5));
        let b = CJet::<Jet2>::seed_slot(4, 1, Complex64::new(-0.3, 2.0));
        let p = &a * &b;
        let expect = a.value() * b.value();
        assert!((p.value() - expect).norm() < 1e-15);
    }

    #[test]
    fn reciprocal_multiplies_back_to_one() {
        let a = CJet::<Jet2>::seed_slot(2, 0, Complex64::new(0.8, 0.6));
        let r = a.recip().unwrap();
        let one = &a * &r;
        assert!((one.value() - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        for i in 0..2 {
            assert!(one.re.g[i].abs() < 1e-14);
            assert!(one.im.g[i].abs() < 1e-14);
        }
    }

    #[test]
    fn modsq_is_real_square_norm() {
        let a = CJet::<Jet2>::seed_slot(2, 0, Complex64::new(3.0, 4.0));
        let m = a.modsq();
        assert_eq!(m.v, 25.0);
        assert_eq!(m.g[0], 6.0);
        assert_eq!(m.g[1], 8.0);
        assert_eq!(m.h[(0, 0)], 2.0);
        assert_eq!(m.h[(1, 1)], 2.0);
        assert_eq!(m.h[(0, 1)], 0.0);
    }
}
