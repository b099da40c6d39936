//! The verification battery: every analytic identity and positivity
//! claim, evaluated over the stratified sample plan with explicit
//! tolerances and worst-case reporting.

use super::samples::{
    base_band_points, consistency_pairs, strata_samples, Sample, Stratum,
};
use super::{candidate_matrix, Gauge, HopfAnnulus};
use crate::blowup::{fubini_study, pullback_herm, realify_jacobian, ChartPoint, Region};
use crate::bundle::{BundleWeight, CurvatureSample};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::forms::{herm1_to_two_form_jet, pairing, wedge};
use crate::linalg::{hermitian_eigenvalues, singular_values};
use crate::tol::{
    E_NEGATIVE_MARGIN, N_SEARCH_CAP, SV_RANK_CUT, TOL_CHART_CONSISTENCY, TOL_DTHETA, TOL_EXACT,
    TOL_FS_MATCH, TOL_LEE_CLOSED, TOL_SEMIDEFINITE,
};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// One named check with its decisive observed quantity.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// The extremal observed value the pass decision was made on.
    pub observed: f64,
    pub threshold: f64,
    /// Number of evaluation points that fed the check.
    pub samples: usize,
    pub detail: String,
}

impl CheckResult {
    fn max_under(
        name: &str,
        threshold: f64,
        samples: usize,
        observed: f64,
        detail: String,
    ) -> Self {
        CheckResult {
            name: name.to_string(),
            passed: observed <= threshold,
            observed,
            threshold,
            samples,
            detail,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Verification {
    pub checks: Vec<CheckResult>,
    /// The positivity constant, when one was found or given.
    pub n_constant: Option<u64>,
    pub passed: bool,
}

/// Precomputed per-sample data shared by all checks.
pub struct Pipeline {
    pub config: RunConfig,
    pub region: Region,
    pub bundle: BundleWeight,
    pub hopf: HopfAnnulus,
    pub samples: Vec<Sample>,
    pub gauges: Vec<Gauge>,
    pub curvatures: Vec<CurvatureSample>,
    pub pairs: Vec<(ChartPoint, ChartPoint)>,
    pub base_points: Vec<Vec<Complex64>>,
}

/// Tracks the worst value seen together with where it happened.
struct Worst {
    value: f64,
    detail: String,
}

impl Worst {
    fn new() -> Self {
        Worst {
            value: f64::NEG_INFINITY,
            detail: String::new(),
        }
    }

    fn update(&mut self, value: f64, detail: impl FnOnce() -> String) {
        if value > self.value {
            self.value = value;
            self.detail = detail();
        }
    }

    fn observed(&self) -> f64 {
        if self.value == f64::NEG_INFINITY {
            0.0
        } else {
            self.value
        }
    }
}

fn describe(sample: &Sample, idx: usize) -> String {
    format!(
        "worst at {} sample {} in chart {}",
        sample.stratum.name(),
        idx,
        sample.point.chart
    )
}

impl Pipeline {
    pub fn build(config: RunConfig) -> Result<Pipeline> {
        let (region, bundle) = config.build()?;
        let hopf = HopfAnnulus::new(region.clone());
        let samples = strata_samples(&region, config.samples, config.seed);
        let pairs = consistency_pairs(&region, 48, config.seed);
        let base_points = base_band_points(&region, 5, config.samples, config.seed);
        let source = config.source();
        let gauges = samples
            .iter()
            .map(|s| hopf.gauge_at(&bundle, &s.point, source))
            .collect::<Result<Vec<_>>>()?;
        let curvatures = samples
            .iter()
            .map(|s| bundle.curvature(&s.point))
            .collect::<Result<Vec<_>>>()?;
        Ok(Pipeline {
            config,
            region,
            bundle,
            hopf,
            samples,
            gauges,
            curvatures,
            pairs,
            base_points,
        })
    }

    fn on_divisor(&self) -> impl Iterator<Item = usize> + '_ {
        self.samples
            .iter()
            .enumerate()
            .filter(|(_, s)| s.stratum == Stratum::OnDivisor)
            .map(|(i, _)| i)
    }

    /// Checks the ambient structure: d omega = theta wedge omega and
    /// d theta = 0 over the annulus bands.
    fn check_base_structure(&self) -> Result<[CheckResult; 2]> {
        let mut worst_id = Worst::new();
        let mut worst_closed = Worst::new();
        for (i, z) in self.base_points.iter().enumerate() {
            let herm = self.hopf.metric_herm1(z)?;
            let omega = herm1_to_two_form_jet(&herm)?;
            let theta = self.hopf.lee_form(z)?;
            let residual = omega
                .d()
                .sub(&wedge(&theta.one_form(), &omega.two_form())?);
            let detail = || format!("worst at annulus point {i}");
            worst_id.update(residual.sup_norm(), detail);
            worst_closed.update(theta.d().sup_norm(), detail);
        }
        let n_pts = self.base_points.len();
        Ok([
            CheckResult::max_under(
                "base_lck_identity",
                self.config.tol_analytic,
                n_pts,
                worst_id.observed(),
                worst_id.detail.clone(),
            ),
            CheckResult::max_under(
                "base_lee_closed",
                TOL_LEE_CLOSED,
                n_pts,
                worst_closed.observed(),
                worst_closed.detail.clone(),
            ),
        ])
    }

    fn check_curvature_support(&self) -> CheckResult {
        let mut worst = Worst::new();
        let mut count = 0;
        for (i, s) in self.samples.iter().enumerate() {
            if matches!(s.stratum, Stratum::GaugeBand | Stratum::Far) {
                count += 1;
                let norm = self.curvatures[i].two_form.two_form().sup_norm();
                worst.update(norm, || describe(s, i));
            }
        }
        CheckResult::max_under(
            "curvature_support",
            TOL_EXACT,
            count,
            worst.observed(),
            worst.detail,
        )
    }

    fn check_fs_match(&self) -> Result<CheckResult> {
        let mut worst = Worst::new();
        let mut count = 0;
        for (i, s) in self.samples.iter().enumerate() {
            if !matches!(s.stratum, Stratum::OnDivisor | Stratum::NearDivisor) {
                continue;
            }
            count += 1;
            let u: Vec<Complex64> = s.point.u_slots().iter().map(|&(_, u)| u).collect();
            let fs = fubini_study(&u);
            let proj = self.region.projection_jacobian(&s.point)?;
            let expected = pullback_herm(&fs, &proj);
            let m = &self.curvatures[i].matrix;
            let diff = (m + expected)
                .iter()
                .fold(0.0f64, |acc, z| acc.max(z.norm()));
            worst.update(diff, || describe(s, i));
        }
        Ok(CheckResult::max_under(
            "curvature_fs_match",
            TOL_FS_MATCH,
            count,
            worst.observed(),
            worst.detail,
        ))
    }

    fn check_e_restriction(&self) -> Result<[CheckResult; 2]> {
        let mut worst_restricted = Worst::new();
        let mut worst_full = Worst::new();
        let mut count = 0;
        for i in self.on_divisor() {
            count += 1;
            let s = &self.samples[i];
            let m = &self.curvatures[i].matrix;
            let slots: Vec<usize> = s.point.u_slots().iter().map(|&(slot, _)| slot).collect();
            let sub = DMatrix::from_fn(slots.len(), slots.len(), |a, b| {
                m[(slots[a], slots[b])]
            });
            let eig_sub = hermitian_eigenvalues(&sub)?;
            worst_restricted.update(eig_sub[eig_sub.len() - 1], || describe(s, i));
            let eig_full = hermitian_eigenvalues(m)?;
            worst_full.update(eig_full[eig_full.len() - 1], || describe(s, i));
        }
        let restricted = CheckResult {
            name: "curvature_e_restriction".to_string(),
            passed: worst_restricted.value < E_NEGATIVE_MARGIN,
            observed: worst_restricted.value,
            threshold: E_NEGATIVE_MARGIN,
            samples: count,
            detail: format!(
                "largest restricted eigenvalue; must stay below the margin; {}",
                worst_restricted.detail
            ),
        };
        let full = CheckResult::max_under(
            "curvature_e_semidefinite",
            TOL_SEMIDEFINITE,
            count,
            worst_full.observed(),
            worst_full.detail.clone(),
        );
        Ok([restricted, full])
    }

    fn check_curvature_closed(&self) -> CheckResult {
        let mut worst = Worst::new();
        for (i, s) in self.samples.iter().enumerate() {
            worst.update(self.curvatures[i].d_exact.sup_norm(), || describe(s, i));
        }
        CheckResult::max_under(
            "curvature_closed",
            self.config.tol_glued,
            self.samples.len(),
            worst.observed(),
            worst.detail,
        )
    }

    fn check_chart_consistency(&self) -> Result<CheckResult> {
        let mut worst = Worst::new();
        for (i, (pj, pk)) in self.pairs.iter().enumerate() {
            let mj = self.bundle.curvature(pj)?.matrix;
            let mk = self.bundle.curvature(pk)?.matrix;
            let target = match pk.chart {
                crate::blowup::ChartId::Blow(k) => k,
                crate::blowup::ChartId::Base => unreachable!("pairs are blow charts"),
            };
            let jac = self.region.transition_jacobian(pj, target)?;
            let pulled = pullback_herm(&mk, &jac);
            let scale = 1.0 + mj.iter().fold(0.0f64, |a, z| a.max(z.norm()));
            let diff = (&pulled - &mj)
                .iter()
                .fold(0.0f64, |a, z| a.max(z.norm()));
            worst.update(diff / scale, || format!("worst at overlap pair {i}"));
        }
        Ok(CheckResult::max_under(
            "curvature_chart_consistency",
            TOL_CHART_CONSISTENCY,
            self.pairs.len(),
            worst.observed(),
            worst.detail,
        ))
    }

    fn check_kernel(&self) -> Result<[CheckResult; 2]> {
        let mut worst_second_sv = Worst::new();
        let mut worst_image = Worst::new();
        let mut rank_ok = true;
        let mut count = 0;
        for i in self.on_divisor() {
            count += 1;
            let s = &self.samples[i];
            let jac = self.region.blowdown_jacobian(&s.point);
            let sv = singular_values(&jac);
            let above = sv.iter().filter(|&&v| v > SV_RANK_CUT).count();
            if above != 1 {
                rank_ok = false;
            }
            if sv.len() > 1 {
                worst_second_sv.update(sv[1], || describe(s, i));
            }
            let jr = realify_jacobian(&jac);
            for v in self.region.exceptional_tangent(&s.point)? {
                let img = &jr * &v;
                worst_image.update(img.amax(), || describe(s, i));
            }
        }
        let rank = CheckResult {
            name: "kernel_rank".to_string(),
            passed: rank_ok && worst_second_sv.observed() <= SV_RANK_CUT,
            observed: worst_second_sv.observed(),
            threshold: SV_RANK_CUT,
            samples: count,
            detail: format!(
                "second singular value of the blow-down differential; {}",
                worst_second_sv.detail
            ),
        };
        let images = CheckResult::max_under(
            "kernel_images",
            TOL_EXACT,
            count,
            worst_image.observed(),
            worst_image.detail.clone(),
        );
        Ok([rank, images])
    }

    /// The gauged Lee form must vanish wherever the construction
    /// promises a flat gauge: every sample whose polydisc moduli all
    /// stay within three gluing radii of the center. This is a fixed
    /// design region, independent of the configured cutoff, so a
    /// shrunken gauge cutoff fails here instead of passing vacuously.
    fn check_gauge_theta_vanishes(&self) -> CheckResult {
        let flat_sq = (3.0 * self.region.eps) * (3.0 * self.region.eps);
        let mut worst = Worst::new();
        let mut count = 0;
        for (i, s) in self.samples.iter().enumerate() {
            let x = self.region.polydisc_x(&s.point);
            if x.iter().all(|z| z.norm_sqr() <= flat_sq) {
                count += 1;
                worst.update(self.gauges[i].theta_prime.sup_norm(), || describe(s, i));
            }
        }
        CheckResult::max_under(
            "gauge_theta_vanishes",
            TOL_EXACT,
            count,
            worst.observed(),
            worst.detail,
        )
    }

    fn check_conformal_residual(&self) -> Result<CheckResult> {
        let mut worst = Worst::new();
        for (i, s) in self.samples.iter().enumerate() {
            let g = &self.gauges[i];
            let residual = g.omega_prime.d().sub(&wedge(
                &g.theta_prime.one_form(),
                &g.omega_prime.two_form(),
            )?);
            worst.update(residual.sup_norm(), || describe(s, i));
        }
        Ok(CheckResult::max_under(
            "gauge_conformal_residual",
            self.config.tol_glued,
            self.samples.len(),
            worst.observed(),
            worst.detail,
        ))
    }

    fn check_gauge_dtheta(&self) -> CheckResult {
        let mut worst = Worst::new();
        for (i, s) in self.samples.iter().enumerate() {
            worst.update(self.gauges[i].theta_prime.d().sup_norm(), || describe(s, i));
        }
        CheckResult::max_under(
            "gauge_dtheta",
            TOL_DTHETA,
            self.samples.len(),
            worst.observed(),
            worst.detail,
        )
    }

    fn check_support_disjoint(&self) -> CheckResult {
        let mut worst = Worst::new();
        for (i, s) in self.samples.iter().enumerate() {
            let p = self.gauges[i].theta_prime.sup_norm()
                * self.curvatures[i].two_form.two_form().sup_norm();
            worst.update(p, || describe(s, i));
        }
        CheckResult::max_under(
            "support_disjoint",
            TOL_EXACT,
            self.samples.len(),
            worst.observed(),
            worst.detail,
        )
    }

    /// Minimum of eigenvalue margin over all samples at a fixed N.
    fn positivity_margin(&self, n_constant: u64) -> Result<(f64, String)> {
        let mut min_margin = f64::INFINITY;
        let mut detail = String::new();
        for (i, s) in self.samples.iter().enumerate() {
            let g = &self.gauges[i];
            let cand = candidate_matrix(n_constant, g, &self.curvatures[i].matrix);
            let eigs = hermitian_eigenvalues(&cand)?;
            let margin = eigs[0] - self.config.delta * g.omega_prime_herm.trace().re;
            if margin < min_margin {
                min_margin = margin;
                detail = describe(s, i);
            }
        }
        Ok((min_margin, detail))
    }

    /// Finds the positivity constant by doubling, or validates the
    /// given override.
    fn check_positivity(&self) -> Result<(CheckResult, Option<u64>)> {
        if let Some(n_fixed) = self.config.n_override {
            let (margin, detail) = self.positivity_margin(n_fixed)?;
            let check = CheckResult {
                name: "positivity".to_string(),
                passed: margin > 0.0,
                observed: margin,
                threshold: 0.0,
                samples: self.samples.len(),
                detail: format!("fixed N = {n_fixed}; minimal eigenvalue margin; {detail}"),
            };
            let found = check.passed.then_some(n_fixed);
            return Ok((check, found));
        }
        let mut n_constant = 1u64;
        loop {
            let (margin, detail) = self.positivity_margin(n_constant)?;
            if margin > 0.0 {
                let check = CheckResult {
                    name: "positivity".to_string(),
                    passed: true,
                    observed: margin,
                    threshold: 0.0,
                    samples: self.samples.len(),
                    detail: format!(
                        "N = {n_constant} found by doubling; minimal eigenvalue margin; {detail}"
                    ),
                };
                return Ok((check, Some(n_constant)));
            }
            if n_constant >= N_SEARCH_CAP {
                let err = Error::NSearchExhausted(format!(
                    "no positive margin up to N = {n_constant}; last margin {margin} ({detail})"
                ));
                let check = CheckResult {
                    name: "positivity".to_string(),
                    passed: false,
                    observed: margin,
                    threshold: 0.0,
                    samples: self.samples.len(),
                    detail: err.to_string(),
                };
                return Ok((check, None));
            }
            n_constant *= 2;
        }
    }

    /// The glued conformal identity for the full candidate, evaluated
    /// in the factored form whose terms are individually exact: the
    /// conformal part reduces to psi times the exact d of the
    /// pulled-back Kähler form, the curvature part to its exact d, and
    /// the cross term to theta' wedge the curvature, which vanishes by
    /// support disjointness and is computed honestly.
    fn check_lck_final(&self, n_constant: u64) -> Result<CheckResult> {
        let mut worst = Worst::new();
        for (i, s) in self.samples.iter().enumerate() {
            let g = &self.gauges[i];
            let c = &self.curvatures[i];
            let cross = wedge(
                &g.theta_prime.one_form(),
                &c.two_form.two_form(),
            )?;
            let residual = g
                .dq_exact
                .scale(n_constant as f64 * g.psi)
                .sub(&c.d_exact)
                .add(&cross);
            worst.update(residual.sup_norm(), || describe(s, i));
        }
        Ok(CheckResult::max_under(
            "lck_final",
            self.config.tol_glued,
            self.samples.len(),
            worst.observed(),
            worst.detail,
        ))
    }

    fn check_degenerate_directions(&self, n_constant: u64) -> Result<CheckResult> {
        let mut worst_glued = Worst::new();
        let mut min_curv_pair = f64::INFINITY;
        let mut min_random_pair = f64::INFINITY;
        let mut count = 0;
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed.wrapping_add(977));
        let dim = 2 * self.region.n;
        for i in self.on_divisor() {
            count += 1;
            let s = &self.samples[i];
            let g = &self.gauges[i];
            let cand = candidate_matrix(n_constant, g, &self.curvatures[i].matrix);
            for v in self.region.exceptional_tangent(&s.point)? {
                // The glued form is degenerate along the divisor
                // directions; the negated curvature is definite there.
                worst_glued.update(pairing(&g.omega_prime_herm, &v).abs(), || describe(s, i));
                min_curv_pair = min_curv_pair.min(-pairing(&self.curvatures[i].matrix, &v));
            }
            for _ in 0..2 {
                let mut v = DVector::zeros(dim);
                for e in v.iter_mut() {
                    *e = rng.gen_range(-1.0..1.0);
                }
                let norm = v.norm();
                if norm < 1e-9 {
                    continue;
                }
                min_random_pair = min_random_pair.min(pairing(&cand, &v) / (norm * norm));
            }
        }
        let margin = E_NEGATIVE_MARGIN.abs();
        let passed = worst_glued.observed() <= TOL_EXACT
            && min_curv_pair > margin
            && min_random_pair > 0.0;
        Ok(CheckResult {
            name: "degenerate_directions".to_string(),
            passed,
            observed: worst_glued.observed(),
            threshold: TOL_EXACT,
            samples: count,
            detail: format!(
                "glued pairing on divisor directions; curvature pairing min {min_curv_pair:.3e} \
                 (needs > {margin:.0e}); random candidate pairing min {min_random_pair:.3e} \
                 (needs > 0); {}",
                worst_glued.detail
            ),
        })
    }

    /// Runs the whole battery in a fixed order.
    pub fn run(&self) -> Result<Verification> {
        let mut checks = Vec::new();
        checks.extend(self.check_base_structure()?);
        checks.push(self.check_curvature_support());
        checks.push(self.check_fs_match()?);
        checks.extend(self.check_e_restriction()?);
        checks.push(self.check_curvature_closed());
        checks.push(self.check_chart_consistency()?);
        checks.extend(self.check_kernel()?);
        checks.push(self.check_gauge_theta_vanishes());
        checks.push(self.check_conformal_residual()?);
        checks.push(self.check_gauge_dtheta());
        checks.push(self.check_support_disjoint());
        let (positivity, n_constant) = self.check_positivity()?;
        checks.push(positivity);
        let n_for_residual = n_constant.unwrap_or(1);
        checks.push(self.check_lck_final(n_for_residual)?);
        checks.push(self.check_degenerate_directions(n_for_residual)?);
        let passed = checks.iter().all(|c| c.passed);
        Ok(Verification {
            checks,
            n_constant,
            passed,
        })
    }
}

/// Builds the pipeline and runs every check.
pub fn run_verification(config: RunConfig) -> Result<Verification> {
    Pipeline::build(config)?.run()
}
