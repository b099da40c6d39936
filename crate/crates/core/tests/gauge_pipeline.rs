//! The conformal gauge and glued candidate through the whole pipeline,
//! cross-checked against the independent pairing oracle and both
//! potential sources.

mod common;

use common::{c, pairing_oracle};
use lck_blowup::blowup::ChartPoint;
use lck_blowup::bundle::BundleWeight;
use lck_blowup::config::RunConfig;
use lck_blowup::forms::pairing;
use lck_blowup::lck::verify::Pipeline;
use lck_blowup::lck::{candidate_matrix, HopfAnnulus, PotentialSource};
use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn setup(n: usize) -> (HopfAnnulus, BundleWeight) {
    let config = RunConfig {
        n,
        ..RunConfig::default()
    };
    let (region, bundle) = config.build().unwrap();
    (HopfAnnulus::new(region), bundle)
}

#[test]
fn gauge_sources_agree_everywhere_it_matters() {
    let (hopf, bundle) = setup(2);
    let eps = hopf.region.eps;
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..10 {
        let z: Vec<Complex64> = hopf
            .region
            .center
            .iter()
            .map(|cc| {
                let m = eps * rng.gen_range(0.5..3.8);
                cc + m * c(0.0, rng.gen_range(-3.0..3.0)).exp()
            })
            .collect();
        let p = hopf.region.to_blow_chart(&z, 0).unwrap();
        let a = hopf
            .gauge_at(&bundle, &p, PotentialSource::Analytic)
            .unwrap();
        let q = hopf
            .gauge_at(&bundle, &p, PotentialSource::Quadrature)
            .unwrap();
        assert!((a.xi.v - q.xi.v).abs() < 1e-8);
        assert!((a.psi - q.psi).abs() < 1e-8 * a.psi);
        let diff = (&a.omega_prime_herm - &q.omega_prime_herm)
            .iter()
            .fold(0.0f64, |m, z| m.max(z.norm()));
        assert!(diff < 1e-7, "omega deviation {diff}");
    }
}

#[test]
fn pairing_agrees_with_the_oracle_on_pipeline_matrices() {
    let cfg = RunConfig {
        samples: 10,
        ..RunConfig::default()
    };
    let pipe = Pipeline::build(cfg).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for (g, curv) in pipe.gauges.iter().zip(&pipe.curvatures).take(20) {
        let cand = candidate_matrix(4096, g, &curv.matrix);
        for _ in 0..5 {
            let v = DVector::from_fn(4, |_, _| rng.gen_range(-1.0..1.0));
            let lib = pairing(&cand, &v);
            let oracle = pairing_oracle(&cand, &v);
            assert!((lib - oracle).abs() < 1e-10 * (1.0 + oracle.abs()));
        }
    }
}

#[test]
fn candidate_stays_positive_across_seeds() {
    for seed in [7u64, 19, 101] {
        let cfg = RunConfig {
            samples: 30,
            seed,
            ..RunConfig::default()
        };
        let v = Pipeline::build(cfg).unwrap().run().unwrap();
        assert!(v.passed, "seed {seed} failed");
        assert!(v.n_constant.is_some());
    }
}

#[test]
fn positivity_constant_grows_as_the_gluing_radius_shrinks() {
    let mut last = 0u64;
    for (i, frac) in [0.125f64, 0.0625, 0.03125].iter().enumerate() {
        let mut cfg = RunConfig {
            samples: 25,
            ..RunConfig::default()
        };
        let (region, _) = cfg.build().unwrap();
        cfg.eps = Some(frac * region.polyradius);
        let v = Pipeline::build(cfg).unwrap().run().unwrap();
        assert!(v.passed, "fraction {frac} failed");
        let n = v.n_constant.unwrap();
        if i > 0 {
            assert!(n >= last, "N should not drop when eps shrinks");
        }
        last = n;
    }
}

#[test]
fn gauge_flatness_holds_on_every_near_divisor_sample() {
    let cfg = RunConfig {
        samples: 60,
        seed: 5,
        ..RunConfig::default()
    };
    let pipe = Pipeline::build(cfg).unwrap();
    for (s, g) in pipe.samples.iter().zip(&pipe.gauges) {
        if matches!(
            s.stratum,
            lck_blowup::lck::samples::Stratum::OnDivisor
                | lck_blowup::lck::samples::Stratum::NearDivisor
        ) {
            assert_eq!(g.theta_prime.sup_norm(), 0.0);
            assert_eq!(g.theta_prime.d().sup_norm(), 0.0);
        }
    }
}

#[test]
fn candidate_restricted_to_divisor_directions_is_the_curvature() {
    let (hopf, bundle) = setup(3);
    let p = ChartPoint::blow(
        3,
        2,
        c(0.0, 0.0),
        &[c(0.7, -0.2), c(-0.4, 0.9)],
    );
    let g = hopf
        .gauge_at(&bundle, &p, PotentialSource::Analytic)
        .unwrap();
    let curv = bundle.curvature(&p).unwrap();
    let cand = candidate_matrix(1 << 20, &g, &curv.matrix);
    for v in hopf.region.exceptional_tangent(&p).unwrap() {
        let through_candidate = pairing_oracle(&cand, &v);
        let through_curvature = -pairing_oracle(&curv.matrix, &v);
        // The glued term pairs to exactly zero along the divisor, so
        // the candidate reduces to the negated curvature there.
        assert_eq!(through_candidate, through_curvature);
        assert!(through_curvature > 1e-3);
    }
}
