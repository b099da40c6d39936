//! The locally conformally Kähler data on the annulus and its glued
//! counterpart on the blow-up.
//!
//! The ambient structure is omega = e^g * i ddbar(q) with q = |z|^2 and
//! g = -log |z|^2, so the Lee form is theta = dg and d(omega) = theta
//! wedge omega holds identically. Pulling back along the blow-down and
//! multiplying by e^xi, where xi interpolates between the constant g(P)
//! near the center and the pulled-back g outside the gauge cutoff,
//! produces a form omega' that is Kähler near the exceptional set and
//! matches the conformal pullback away from it. The verified candidate
//! is N omega' - curvature, with N found by doubling until positivity
//! holds with margin.

pub mod samples;
pub mod verify;

use crate::blowup::{ChartPoint, Region};
use crate::bundle::BundleWeight;
use crate::error::{Error, Result};
use crate::forms::{Herm1, OneFormJet, TwoFormJet};
use crate::jets::{compose_multi2, CJet, Jet2, Jet3, JetLike, Smooth};
use crate::tol::QUADRATURE_TOL;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// How the Lee potential is obtained in chart coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PotentialSource {
    /// Closed-form -log |z|^2 evaluated through jets.
    Analytic,
    /// Value reconstructed by integrating the Lee form along a segment
    /// from the center, derivatives taken from the Lee form itself.
    Quadrature,
}

/// The ambient structure on the annulus.
pub struct HopfAnnulus {
    pub region: Region,
}

impl HopfAnnulus {
    pub fn new(region: Region) -> Self {
        HopfAnnulus { region }
    }

    /// g = -log |z|^2 at an ambient point.
    pub fn g_value(&self, z: &[Complex64]) -> f64 {
        -z.iter().map(|c| c.norm_sqr()).sum::<f64>().ln()
    }

    /// The squared-norm potential as a jet of ambient coordinates
    /// seeded at z.
    pub fn q_ambient_jet<S: JetLike>(&self, z: &[Complex64]) -> S {
        let dim = 2 * z.len();
        let mut s = S::constant(dim, 0.0);
        for (a, &za) in z.iter().enumerate() {
            let j: CJet<S> = CJet::seed_slot(dim, a, za);
            s = s.add(&j.modsq());
        }
        s
    }

    /// g as a jet of ambient coordinates seeded at z.
    pub fn g_ambient_jet<S: JetLike>(&self, z: &[Complex64]) -> Result<S> {
        Ok(self.q_ambient_jet::<S>(z).ln()?.neg())
    }

    /// Metric coefficients with entry gradients in ambient coordinates:
    /// H = e^g I.
    pub fn metric_herm1(&self, z: &[Complex64]) -> Result<Herm1> {
        let n = z.len();
        let eg: Jet2 = self.g_ambient_jet::<Jet2>(z)?.exp();
        let diag = |s: f64| {
            DMatrix::from_fn(n, n, |a, b| {
                Complex64::new(if a == b { s } else { 0.0 }, 0.0)
            })
        };
        Ok(Herm1 {
            value: diag(eg.v),
            grad: (0..2 * n).map(|r| diag(eg.g[r])).collect(),
        })
    }

    /// The Lee form theta = dg with coefficient derivatives, in ambient
    /// coordinates.
    pub fn lee_form(&self, z: &[Complex64]) -> Result<OneFormJet> {
        Ok(OneFormJet::from_gradient_jet(&self.g_ambient_jet::<Jet2>(z)?))
    }

    /// Reconstructs g(z) by integrating theta along the straight
    /// segment from the center, anchored at g(center).
    pub fn lee_potential_quadrature(&self, z: &[Complex64]) -> Result<f64> {
        let p = &self.region.center;
        let dir: Vec<Complex64> = z.iter().zip(p).map(|(a, b)| a - b).collect();
        let integrand = |s: f64| -> Result<f64> {
            let y: Vec<Complex64> = p.iter().zip(&dir).map(|(a, d)| a + d * s).collect();
            let ysq: f64 = y.iter().map(|c| c.norm_sqr()).sum();
            if !self.region.in_annulus(&y) {
                return Err(Error::QuadratureExit { param: s });
            }
            // theta(gamma') = -2 Re <gamma, gamma'> / |gamma|^2.
            let dot: f64 = y
                .iter()
                .zip(&dir)
                .map(|(a, d)| (a * d.conj()).re)
                .sum();
            Ok(-2.0 * dot / ysq)
        };
        let anchor = self.g_value(p);
        Ok(anchor + adaptive_simpson(&integrand, 0.0, 1.0, QUADRATURE_TOL)?)
    }

    /// The Lee form coefficients and their symmetrized derivative
    /// matrix at an ambient point, derived from theta alone.
    fn lee_data(&self, z: &[Complex64]) -> Result<(Vec<f64>, DMatrix<f64>)> {
        let theta = self.lee_form(z)?;
        let dim = 2 * z.len();
        let mut h = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in i..dim {
                let v = 0.5 * (theta.grads[i][j] + theta.grads[j][i]);
                h[(i, j)] = v;
                h[(j, i)] = v;
            }
        }
        Ok((theta.values, h))
    }

    /// The pulled-back Lee potential g(c(.)) as a chart jet.
    pub fn g_pullback_jet2(
        &self,
        p: &ChartPoint,
        source: PotentialSource,
    ) -> Result<Jet2> {
        match source {
            PotentialSource::Analytic => {
                let z = self.region.ambient_cjets::<Jet2>(p);
                let mut s = Jet2::constant(2 * p.n(), 0.0);
                for za in &z {
                    s = s.add(&za.modsq());
                }
                Ok(s.ln()?.neg())
            }
            PotentialSource::Quadrature => {
                let zv = self.region.ambient(p);
                let value = self.lee_potential_quadrature(&zv)?;
                let (grad, hess) = self.lee_data(&zv)?;
                let inner = interleave_real_jets(&self.region.ambient_cjets::<Jet2>(p));
                Ok(compose_multi2(
                    value,
                    &DVector::from_vec(grad),
                    &hess,
                    &inner,
                ))
            }
        }
    }

    /// q(c(.)) as a third-order chart jet; exact because q pulls back
    /// to a polynomial.
    pub fn q_pullback_jet3(&self, p: &ChartPoint) -> Jet3 {
        let z = self.region.ambient_cjets::<Jet3>(p);
        let mut s = Jet3::constant(2 * p.n(), 0.0);
        for za in &z {
            s = s.add(&za.modsq());
        }
        s
    }
}

/// Splits complex jets into their interleaved real component jets.
fn interleave_real_jets(z: &[CJet<Jet2>]) -> Vec<Jet2> {
    let mut out = Vec::with_capacity(2 * z.len());
    for za in z {
        out.push(za.re.clone());
        out.push(za.im.clone());
    }
    out
}

/// Everything the glued verification needs at one chart point.
pub struct Gauge {
    pub point: ChartPoint,
    /// xi = chi (g(P) - g o c) + g o c.
    pub xi: Jet2,
    /// theta' = d xi, the candidate Lee form.
    pub theta_prime: OneFormJet,
    /// e^xi.
    pub psi: f64,
    /// q o c as an exact polynomial jet.
    pub q_pullback: Jet3,
    /// Q = i ddbar(q o c) with coefficient derivatives.
    pub q_two_form: TwoFormJet,
    /// Exterior derivative of Q through the exact tables.
    pub dq_exact: crate::forms::RealPForm,
    /// omega' = psi Q as a 2-form with derivatives.
    pub omega_prime: TwoFormJet,
    /// Coefficient matrix of omega' in chart coordinates.
    pub omega_prime_herm: DMatrix<Complex64>,
    pub chi_value: f64,
}

impl HopfAnnulus {
    /// Builds the gauge data at a chart point.
    pub fn gauge_at(
        &self,
        bundle: &BundleWeight,
        p: &ChartPoint,
        source: PotentialSource,
    ) -> Result<Gauge> {
        let g_center = self.g_value(&self.region.center);
        let a = self.g_pullback_jet2(p, source)?;
        let chi = bundle.chi_jet2(p)?;
        // On the chi plateau the two copies of the pullback cancel in
        // every derivative entry, leaving the exact constant gauge.
        let xi = chi.mul(&a.neg().add_scalar(g_center)).add(&a);
        let theta_prime = OneFormJet::from_gradient_jet(&xi);
        let psi = xi.v.exp();
        let q_pullback = self.q_pullback_jet3(p);
        let q_two_form = bundle.layout.two_form_jet(&q_pullback);
        let dq_exact = bundle.layout.d_from_third(&q_pullback);
        let psi_grad: Vec<f64> = xi.g.iter().map(|gi| psi * gi).collect();
        let omega_prime = q_two_form.scale_by_function(psi, &psi_grad);
        let omega_prime_herm =
            crate::potential::ddbar_from_hess(&q_pullback.h) * Complex64::new(psi, 0.0);
        Ok(Gauge {
            point: p.clone(),
            xi,
            theta_prime,
            psi,
            q_pullback,
            q_two_form,
            dq_exact,
            omega_prime,
            omega_prime_herm,
            chi_value: chi.v,
        })
    }
}

/// Adaptive Simpson integration with the standard error/15 acceptance
/// test, propagating integrand failures.
pub fn adaptive_simpson<F: Fn(f64) -> Result<f64>>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<f64> {
    fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
        h / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> Result<f64>>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: usize,
    ) -> Result<f64> {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm)?;
        let frm = f(rm)?;
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return Ok(left + right + delta / 15.0);
        }
        Ok(recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?
            + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?)
    }
    let fa = f(a)?;
    let fb = f(b)?;
    let m = 0.5 * (a + b);
    let fm = f(m)?;
    let whole = simpson(fa, fm, fb, b - a);
    recurse(f, a, b, fa, fm, fb, whole, tol, 40)
}

/// The candidate coefficient matrix N omega' - curvature at one point.
pub fn candidate_matrix(
    n_constant: u64,
    gauge: &Gauge,
    curvature: &DMatrix<Complex64>,
) -> DMatrix<Complex64> {
    &gauge.omega_prime_herm * Complex64::new(n_constant as f64, 0.0) - curvature
}
