//! The glued Hermitian weight on the exceptional line bundle and its
//! curvature.
//!
//! A flat radial cutoff rho blends the squared-distance weight near the
//! center into the constant weight 1 outside, factor by factor over the
//! polydisc coordinates: w = rho * sum |x_i|^2 + (1 - rho). Each chart
//! carries the trivialized weight, base chart -log(w), blow chart
//! -log(w) + log|t|^2, and the curvature is i ddbar of that weight.
//!
//! Evaluation is branched on which cutoff factors sit in their flat
//! regions. The branches agree to every order where they meet because
//! the mollifier is flat there, and each branch avoids the forbidden
//! cancellation: near the center the blow chart formula is free of t,
//! and outside the cutoff support the weight is the exact constant 1.

use crate::blowup::{ChartId, ChartPoint, Region};
use crate::error::{Error, Result};
use crate::forms::{Herm1, RealPForm, TwoFormJet};
use crate::jets::{CJet, Jet2, Jet3, JetLike, Smooth};
use crate::potential::{ddbar_herm1, DdbarLayout};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// A flat radial cutoff in one squared modulus: identically 1 for
/// |x| <= inner, identically 0 for |x| >= outer, smooth in between.
#[derive(Clone, Debug)]
pub struct RadialCutoff {
    pub inner: f64,
    pub outer: f64,
}

impl RadialCutoff {
    pub fn new(inner: f64, outer: f64) -> Result<Self> {
        if !(inner > 0.0 && outer > inner && outer.is_finite()) {
            return Err(Error::BumpRadius);
        }
        Ok(RadialCutoff { inner, outer })
    }

    /// True when the squared modulus lies in the inner flat region.
    /// This exact comparison is shared by every branch decision.
    pub fn in_plateau(&self, modsq: f64) -> bool {
        modsq <= self.inner * self.inner
    }

    /// True when the squared modulus lies outside the support.
    pub fn outside_support(&self, modsq: f64) -> bool {
        modsq >= self.outer * self.outer
    }

    /// The cutoff in one coordinate as a function of |x|^2, taking the
    /// squared modulus as a jet. Flat regions return exact constant
    /// jets; in between, s(r) = sig(r) / (sig(r) + sig(1 - r)) with
    /// sig(x) = exp(-1/x) and r = (outer - |x|) / (outer - inner).
    pub fn factor<S: Smooth>(&self, modsq: &S) -> Result<S> {
        let m = modsq.value();
        if self.in_plateau(m) {
            return Ok(modsq.constant_like(1.0));
        }
        if self.outside_support(m) {
            return Ok(modsq.constant_like(0.0));
        }
        // Strictly inside the transition: inner < |x| < outer, so the
        // square root and both reciprocals are safe.
        let width = self.outer - self.inner;
        let r = modsq
            .sqrt()?
            .neg()
            .add_scalar(self.outer)
            .scale(1.0 / width);
        let sig = |x: &S| -> Result<S> { Ok(x.recip()?.neg().exp()) };
        let a = sig(&r)?;
        let b = sig(&r.neg().add_scalar(1.0))?;
        a.div(&a.add(&b))
    }

    /// Product of the per-coordinate factors.
    pub fn product<S: Smooth>(&self, modsqs: &[S]) -> Result<S> {
        let mut acc = modsqs[0].constant_like(1.0);
        for m in modsqs {
            acc = acc.mul(&self.factor(m)?);
        }
        Ok(acc)
    }
}

/// Curvature data at one chart point.
pub struct CurvatureSample {
    /// A local potential whose complex Hessian is the curvature. It
    /// differs from the chart weight by pluriharmonic logs, dropped
    /// branch by branch because their complex Hessians vanish
    /// identically.
    pub potential: Jet3,
    /// Curvature coefficient matrix in the chart coordinates.
    pub matrix: DMatrix<Complex64>,
    /// Curvature with entry gradients.
    pub herm1: Herm1,
    /// Real 2-form presentation with coefficient derivatives.
    pub two_form: TwoFormJet,
    /// Exterior derivative through the exact cancellation tables.
    pub d_exact: RealPForm,
}

/// The glued weight over a fixed region, with the curvature cutoff and
/// the wider gauge cutoff used downstream.
pub struct BundleWeight {
    pub region: Region,
    /// Cutoff of the squared-distance weight: flat inside eps,
    /// vanishing outside 2 eps.
    pub rho: RadialCutoff,
    /// Gauge cutoff, flat out to chi_inner and gone at chi_outer.
    pub chi: RadialCutoff,
    pub layout: DdbarLayout,
}

impl BundleWeight {
    pub fn new(region: Region, chi_inner_mult: f64, chi_outer_mult: f64) -> Result<Self> {
        let eps = region.eps;
        let rho = RadialCutoff::new(eps, 2.0 * eps)?;
        let chi = RadialCutoff::new(chi_inner_mult * eps, chi_outer_mult * eps)?;
        if chi.outer > region.polyradius {
            return Err(Error::RegionNesting(format!(
                "gauge cutoff outer radius {} exceeds polyradius {}",
                chi.outer, region.polyradius
            )));
        }
        let layout = DdbarLayout::new(region.n);
        Ok(BundleWeight {
            region,
            rho,
            chi,
            layout,
        })
    }

    /// Squared moduli of the polydisc offsets as jets in the chart.
    fn modsq_jets<S: JetLike>(&self, p: &ChartPoint) -> Vec<S> {
        self.region
            .polydisc_cjets::<S>(p)
            .iter()
            .map(CJet::modsq)
            .collect()
    }

    /// The glued weight w as a jet, w = rho * sum |x_i|^2 + (1 - rho).
    fn w_jet<S: JetLike>(&self, p: &ChartPoint) -> Result<S> {
        let modsqs = self.modsq_jets::<S>(p);
        let rho = self.rho.product(&modsqs)?;
        let mut dsq = modsqs[0].constant_like(0.0);
        for m in &modsqs {
            dsq = dsq.add(m);
        }
        let one = rho.constant_like(1.0);
        Ok(rho.mul(&dsq).add(&one.sub(&rho)))
    }

    /// Value of the trivialized chart weight: -log w in the base
    /// chart, -log w + log |t|^2 in a blow chart.
    pub fn weight_value(&self, p: &ChartPoint) -> Result<f64> {
        let x = self.region.polydisc_x(p);
        match p.chart {
            ChartId::Base => {
                let w = self.w_value(&x);
                if w <= 0.0 {
                    return Err(Error::JetLogDomain { value: w });
                }
                Ok(-w.ln())
            }
            ChartId::Blow(_) => {
                let tsq = p.t().norm_sqr();
                if self.all_in_plateau(&x) {
                    // w = |t|^2 (1 + |u|^2) exactly on the flat region.
                    Ok(-(1.0 + p.u_norm_sq()).ln())
                } else {
                    if tsq == 0.0 {
                        return Err(Error::NotOnDivisor { t_abs: 0.0 });
                    }
                    Ok(-self.w_value(&x).ln() + tsq.ln())
                }
            }
        }
    }

    fn w_value(&self, x: &[Complex64]) -> f64 {
        let modsqs: Vec<f64> = x.iter().map(|c| c.norm_sqr()).collect();
        let rho = modsqs
            .iter()
            .fold(1.0, |acc, &m| acc * self.factor_value(m));
        let dsq: f64 = modsqs.iter().sum();
        rho * dsq + (1.0 - rho)
    }

    fn factor_value(&self, m: f64) -> f64 {
        // Scalar path through the same jet code keeps the branches
        // aligned with the jet evaluations bit for bit.
        self.rho
            .factor(&m)
            .expect("transition band excludes both log singularities")
    }

    fn all_in_plateau(&self, x: &[Complex64]) -> bool {
        x.iter().all(|c| self.rho.in_plateau(c.norm_sqr()))
    }

    /// A third-order potential jet for the curvature in this chart.
    ///
    /// The returned jet is -log w with every pluriharmonic log |t|^2
    /// dropped, so only its complex Hessian and third tensor are
    /// meaningful. Branches: on the cutoff plateau the blow chart uses
    /// the t-free form -log(1 + |u|^2) and the base chart
    /// -log(sum |x_i|^2); outside the cutoff support the weight is the
    /// exact constant 1 and the jet is exactly zero; in between, the
    /// full -log w is numerically safe because some |x_i| exceeds the
    /// cutoff radius, bounding w away from zero.
    pub fn curvature_potential(&self, p: &ChartPoint) -> Result<Jet3> {
        let x = self.region.polydisc_x(p);
        if self.all_in_plateau(&x) {
            return match p.chart {
                ChartId::Blow(_) => {
                    let n = p.n();
                    let mut s = Jet3::constant(2 * n, 1.0);
                    for (i, _) in p.u_slots() {
                        let u: CJet<Jet3> = CJet::seed_slot(2 * n, i, p.coords[i]);
                        s = s.add(&u.modsq());
                    }
                    Ok(s.ln()?.neg())
                }
                ChartId::Base => {
                    let modsqs = self.modsq_jets::<Jet3>(p);
                    let mut dsq = modsqs[0].constant_like(0.0);
                    for m in &modsqs {
                        dsq = dsq.add(m);
                    }
                    if dsq.value() <= 0.0 {
                        return Err(Error::JetLogDomain { value: dsq.value() });
                    }
                    Ok(dsq.ln()?.neg())
                }
            };
        }
        let w: Jet3 = self.w_jet(p)?;
        Ok(w.ln()?.neg())
    }

    /// Full curvature data at a chart point.
    pub fn curvature(&self, p: &ChartPoint) -> Result<CurvatureSample> {
        let potential = self.curvature_potential(p)?;
        let herm1 = ddbar_herm1(&potential);
        let matrix = herm1.value.clone();
        let two_form = self.layout.two_form_jet(&potential);
        let d_exact = self.layout.d_from_third(&potential);
        Ok(CurvatureSample {
            potential,
            matrix,
            herm1,
            two_form,
            d_exact,
        })
    }

    /// The gauge cutoff as a second-order jet in the chart coordinates.
    pub fn chi_jet2(&self, p: &ChartPoint) -> Result<Jet2> {
        let modsqs = self.modsq_jets::<Jet2>(p);
        self.chi.product(&modsqs)
    }

    /// Value of the curvature cutoff product at a chart point.
    pub fn rho1_value(&self, p: &ChartPoint) -> Result<f64> {
        let x = self.region.polydisc_x(p);
        let mut acc = 1.0;
        for c in &x {
            acc *= self.rho.factor(&c.norm_sqr())?;
        }
        Ok(acc)
    }
}
