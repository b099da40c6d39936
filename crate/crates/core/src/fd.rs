//! Finite-difference derivative estimates and an expression corpus for
//! validating jet arithmetic against plain floating-point evaluation.
//!
//! The estimates use central differences with one Richardson step,
//! R = (4 D(h/2) - D(h)) / 3, which cancels the leading h^2 error term.
//! The corpus generates random closed-form expressions whose partial
//! evaluations stay inside every domain restriction by construction:
//! logarithms and square roots only ever see c + s * e^2 with c > 0,
//! and divisors are bounded away from zero the same way.

use crate::error::Result;
use crate::jets::{JetLike, Smooth};
use nalgebra::DMatrix;
use rand::Rng;

/// Central-difference gradient with one Richardson step.
pub fn richardson_grad<F: Fn(&[f64]) -> f64>(f: F, x: &[f64], h: f64) -> Vec<f64> {
    let central = |h: f64, i: usize| {
        let mut xp = x.to_vec();
        xp[i] += h;
        let mut xm = x.to_vec();
        xm[i] -= h;
        (f(&xp) - f(&xm)) / (2.0 * h)
    };
    (0..x.len())
        .map(|i| (4.0 * central(h / 2.0, i) - central(h, i)) / 3.0)
        .collect()
}

/// Central-difference Hessian with one Richardson step per entry.
pub fn richardson_hess<F: Fn(&[f64]) -> f64>(f: F, x: &[f64], h: f64) -> DMatrix<f64> {
    let dim = x.len();
    let at = |steps: &[(usize, f64)]| {
        let mut xx = x.to_vec();
        for &(i, s) in steps {
            xx[i] += s;
        }
        f(&xx)
    };
    let entry = |h: f64, i: usize, j: usize| {
        if i == j {
            (at(&[(i, h)]) - 2.0 * at(&[]) + at(&[(i, -h)])) / (h * h)
        } else {
            (at(&[(i, h), (j, h)]) - at(&[(i, h), (j, -h)]) - at(&[(i, -h), (j, h)])
                + at(&[(i, -h), (j, -h)]))
                / (4.0 * h * h)
        }
    };
    DMatrix::from_fn(dim, dim, |i, j| {
        (4.0 * entry(h / 2.0, i, j) - entry(h, i, j)) / 3.0
    })
}

/// A closed-form expression over real variables, evaluable through any
/// scalar type implementing the smooth operations.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Var(usize),
    Const(f64),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    /// Division by c + s * d^2, positive by construction.
    SafeDiv(Box<Expr>, f64, f64, Box<Expr>),
    Exp(f64, Box<Expr>),
    /// ln(c + s * e^2) with c > 0.
    SafeLn(f64, f64, Box<Expr>),
    /// sqrt(c + s * e^2) with c > 0.
    SafeSqrt(f64, f64, Box<Expr>),
    Scale(f64, Box<Expr>),
    AddScalar(f64, Box<Expr>),
}

impl Expr {
    /// Evaluates with the variables seeded into the scalar type.
    pub fn eval<S: JetLike>(&self, point: &[f64]) -> Result<S> {
        let dim = point.len();
        let vars: Vec<S> = (0..dim).map(|i| S::seed(dim, i, point[i])).collect();
        self.eval_with(&vars)
    }

    pub fn eval_with<S: Smooth>(&self, vars: &[S]) -> Result<S> {
        let positive = |c: f64, s: f64, e: &Expr| -> Result<S> {
            let inner = e.eval_with(vars)?;
            Ok(inner.mul(&inner).scale(s).add_scalar(c))
        };
        Ok(match self {
            Expr::Var(i) => vars[*i].clone(),
            Expr::Const(c) => vars[0].constant_like(*c),
            Expr::Add(a, b) => a.eval_with(vars)?.add(&b.eval_with(vars)?),
            Expr::Sub(a, b) => a.eval_with(vars)?.sub(&b.eval_with(vars)?),
            Expr::Mul(a, b) => a.eval_with(vars)?.mul(&b.eval_with(vars)?),
            Expr::SafeDiv(a, c, s, d) => a.eval_with(vars)?.div(&positive(*c, *s, d)?)?,
            Expr::Exp(s, a) => a.eval_with(vars)?.scale(*s).exp(),
            Expr::SafeLn(c, s, e) => positive(*c, *s, e)?.ln()?,
            Expr::SafeSqrt(c, s, e) => positive(*c, *s, e)?.sqrt()?,
            Expr::Scale(s, a) => a.eval_with(vars)?.scale(*s),
            Expr::AddScalar(c, a) => a.eval_with(vars)?.add_scalar(*c),
        })
    }

    /// Draws a random expression of bounded depth. Every point of every
    /// branch is safe to evaluate anywhere.
    pub fn random<R: Rng>(rng: &mut R, dim: usize, depth: usize) -> Expr {
        if depth == 0 {
            return if rng.gen_bool(0.75) {
                Expr::Var(rng.gen_range(0..dim))
            } else {
                Expr::Const(rng.gen_range(-1.5..1.5))
            };
        }
        let sub = |rng: &mut R| Box::new(Expr::random(rng, dim, depth - 1));
        let c = |rng: &mut R| rng.gen_range(0.5..2.0);
        let s = |rng: &mut R| rng.gen_range(0.1..1.0);
        match rng.gen_range(0..9) {
            0 => Expr::Add(sub(rng), sub(rng)),
            1 => Expr::Sub(sub(rng), sub(rng)),
            2 => Expr::Mul(sub(rng), sub(rng)),
            3 => {
                let a = sub(rng);
                let cc = c(rng);
                let ss = s(rng);
                Expr::SafeDiv(a, cc, ss, sub(rng))
            }
            4 => Expr::Exp(rng.gen_range(-0.4..0.4), sub(rng)),
            5 => {
                let cc = c(rng);
                let ss = s(rng);
                Expr::SafeLn(cc, ss, sub(rng))
            }
            6 => {
                let cc = c(rng);
                let ss = s(rng);
                Expr::SafeSqrt(cc, ss, sub(rng))
            }
            7 => Expr::Scale(rng.gen_range(-2.0..2.0), sub(rng)),
            _ => Expr::AddScalar(rng.gen_range(-1.0..1.0), sub(rng)),
        }
    }
}

/// Deterministic corpus of expressions plus evaluation points.
pub fn corpus<R: Rng>(rng: &mut R, dim: usize, count: usize) -> Vec<(Expr, Vec<f64>)> {
    (0..count)
        .map(|_| {
            let depth = rng.gen_range(2..=4);
            let e = Expr::random(rng, dim, depth);
            let x: Vec<f64> = (0..dim).map(|_| rng.gen_range(-0.8..0.8)).collect();
            (e, x)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::{Jet2, Jet3};
    use crate::tol::{FD_REL, FD_STEP};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn richardson_matches_closed_form_derivatives() {
        // f(x, y) = exp(x) * y + x^3.
        let f = |p: &[f64]| p[0].exp() * p[1] + p[0].powi(3);
        let x = [0.4, -0.7];
        let g = richardson_grad(f, &x, 1e-4);
        assert!((g[0] - (x[0].exp() * x[1] + 3.0 * x[0] * x[0])).abs() < 1e-10);
        assert!((g[1] - x[0].exp()).abs() < 1e-10);
        let h = richardson_hess(f, &x, 1e-3);
        assert!((h[(0, 0)] - (x[0].exp() * x[1] + 6.0 * x[0])).abs() < 1e-7);
        assert!((h[(0, 1)] - x[0].exp()).abs() < 1e-7);
        assert!((h[(1, 1)]).abs() < 1e-7);
    }

    #[test]
    fn corpus_is_deterministic_per_seed() {
        let mut a = ChaCha8Rng::seed_from_u64(5);
        let mut b = ChaCha8Rng::seed_from_u64(5);
        let ca = corpus(&mut a, 3, 10);
        let cb = corpus(&mut b, 3, 10);
        assert_eq!(ca.len(), cb.len());
        for ((ea, xa), (eb, xb)) in ca.iter().zip(&cb) {
            assert_eq!(ea, eb);
            assert_eq!(xa, xb);
        }
    }

    #[test]
    fn corpus_jets_agree_with_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for (expr, x) in corpus(&mut rng, 3, 25) {
            let scalar = |p: &[f64]| expr.eval::<f64>(p).unwrap();
            let jet: Jet2 = expr.eval(&x).unwrap();
            assert_eq!(jet.v, scalar(&x));
            let g = richardson_grad(scalar, &x, FD_STEP);
            for (i, g_i) in g.iter().enumerate() {
                let tol = FD_REL * (1.0 + g_i.abs());
                assert!(
                    (jet.g[i] - g_i).abs() < tol,
                    "grad[{i}] jet {} fd {} for {expr:?}",
                    jet.g[i],
                    g_i
                );
            }
            let h = richardson_hess(scalar, &x, FD_STEP);
            for i in 0..3 {
                for j in 0..3 {
                    let tol = 1e-4 * (1.0 + h[(i, j)].abs());
                    assert!(
                        (jet.h[(i, j)] - h[(i, j)]).abs() < tol,
                        "hess[{i},{j}] jet {} fd {} for {expr:?}",
                        jet.h[(i, j)],
                        h[(i, j)]
                    );
                }
            }
        }
    }

    #[test]
    fn third_order_jets_match_differenced_jet_hessians() {
        // Third tensor against central differences of the second-order
        // jet Hessian, confirming the two jet orders are consistent.
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for (expr, x) in corpus(&mut rng, 2, 10) {
            let jet: Jet3 = expr.eval(&x).unwrap();
            let h = 1e-5;
            for r in 0..2 {
                let mut xp = x.clone();
                xp[r] += h;
                let mut xm = x.clone();
                xm[r] -= h;
                let hp: Jet2 = expr.eval(&xp).unwrap();
                let hm: Jet2 = expr.eval(&xm).unwrap();
                for i in 0..2 {
                    for j in 0..2 {
                        let fd = (hp.h[(i, j)] - hm.h[(i, j)]) / (2.0 * h);
                        let tol = 1e-5 * (1.0 + fd.abs());
                        assert!(
                            (jet.third(r, i, j) - fd).abs() < tol,
                            "third({r},{i},{j}) jet {} fd {} for {expr:?}",
                            jet.third(r, i, j),
                            fd
                        );
                    }
                }
            }
        }
    }
}
