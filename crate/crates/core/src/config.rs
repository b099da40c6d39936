//! Run configuration shared by the command-line driver and the tests.

use crate::blowup::Region;
use crate::bundle::BundleWeight;
use crate::error::{Error, Result};
use crate::lck::PotentialSource;
use crate::tol;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Everything a verification run depends on. Defaults reproduce the
/// standard annulus setup with the center on the first axis.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunConfig {
    /// Complex dimension of the ambient space.
    pub n: usize,
    pub r_inner: f64,
    pub r_outer: f64,
    /// Modulus of the blow-up center, placed on the first axis.
    pub center: f64,
    /// Cutoff scale override; the default is polyradius / 8.
    pub eps: Option<f64>,
    /// Samples per stratum.
    pub samples: usize,
    pub seed: u64,
    pub tol_analytic: f64,
    pub tol_glued: f64,
    /// Positivity margin multiplier on the trace of the glued form.
    pub delta: f64,
    /// Fixes the positivity constant instead of searching for it.
    pub n_override: Option<u64>,
    pub chi_inner_mult: f64,
    pub chi_outer_mult: f64,
    /// Reconstruct the Lee potential by quadrature instead of the
    /// closed form.
    pub quadrature: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n: 2,
            r_inner: 0.5,
            r_outer: 2.0,
            center: 1.0,
            eps: None,
            samples: 200,
            seed: 42,
            tol_analytic: tol::TOL_ANALYTIC,
            tol_glued: tol::TOL_GLUED,
            delta: tol::DELTA_DEFAULT,
            n_override: None,
            chi_inner_mult: 3.0,
            chi_outer_mult: 4.0,
            quadrature: false,
        }
    }
}

impl RunConfig {
    pub fn source(&self) -> PotentialSource {
        if self.quadrature {
            PotentialSource::Quadrature
        } else {
            PotentialSource::Analytic
        }
    }

    pub fn center_vector(&self) -> Vec<Complex64> {
        let mut c = vec![Complex64::new(0.0, 0.0); self.n];
        c[0] = Complex64::new(self.center, 0.0);
        c
    }

    /// Checks scalar parameters, then builds the region geometry.
    pub fn region(&self) -> Result<Region> {
        if self.samples == 0 {
            return Err(Error::Config("samples per stratum must be positive".into()));
        }
        if !(self.tol_analytic > 0.0 && self.tol_glued > 0.0) {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        if !(self.delta >= 0.0 && self.delta.is_finite()) {
            return Err(Error::Config("delta must be finite and non-negative".into()));
        }
        if !(self.center > 0.0 && self.center.is_finite()) {
            return Err(Error::Config("center modulus must be positive".into()));
        }
        if !(self.chi_inner_mult > 1.0 && self.chi_outer_mult > self.chi_inner_mult) {
            return Err(Error::Config(
                "gauge cutoff multipliers must satisfy 1 < inner < outer".into(),
            ));
        }
        let region = Region::new(self.center_vector(), self.r_inner, self.r_outer)?;
        match self.eps {
            Some(e) => region.with_eps(e),
            None => Ok(region),
        }
    }

    /// Region plus the glued bundle weight with the gauge cutoff.
    pub fn build(&self) -> Result<(Region, BundleWeight)> {
        let region = self.region()?;
        let bundle = BundleWeight::new(
            region.clone(),
            self.chi_inner_mult,
            self.chi_outer_mult,
        )?;
        Ok((region, bundle))
    }
}
