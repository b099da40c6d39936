//! Acceptance battery: one test per required property, each printing
//! a single pass line with its decisive numbers. Pipelines are shared
//! across tests and built once per dimension.

mod common;

use common::{c, fd_grad, fd_hess};
use lck_blowup::blowup::{ChartId, ChartPoint};
use lck_blowup::config::RunConfig;
use lck_blowup::fd::corpus;
use lck_blowup::lck::verify::{CheckResult, Pipeline, Verification};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::process::Command;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

fn shared(n: usize) -> &'static (Verification, Duration) {
    static P2: OnceLock<(Verification, Duration)> = OnceLock::new();
    static P3: OnceLock<(Verification, Duration)> = OnceLock::new();
    let cell = match n {
        2 => &P2,
        3 => &P3,
        _ => panic!("only dimensions 2 and 3 are exercised here"),
    };
    cell.get_or_init(|| {
        let config = RunConfig {
            n,
            ..RunConfig::default()
        };
        let start = Instant::now();
        let v = Pipeline::build(config)
            .expect("pipeline builds")
            .run()
            .expect("battery runs");
        (v, start.elapsed())
    })
}

fn find<'a>(v: &'a Verification, name: &str) -> &'a CheckResult {
    v.checks
        .iter()
        .find(|c| c.name == name)
        .unwrap_or_else(|| panic!("missing check {name}"))
}

fn assert_check(v: &Verification, name: &str, threshold: f64) -> f64 {
    let c = find(v, name);
    assert_eq!(c.threshold, threshold, "{name} runs at the stated tolerance");
    assert!(
        c.passed,
        "{name} failed: observed {:e} vs {:e} ({})",
        c.observed, c.threshold, c.detail
    );
    c.observed
}

#[test]
fn base_structure_is_locally_conformally_kaehler() {
    let mut worst_identity = 0.0f64;
    let mut worst_closed = 0.0f64;
    for n in [2usize, 3] {
        let (v, elapsed) = shared(n);
        let id = find(v, "base_lck_identity");
        assert!(
            id.samples >= 1000,
            "needs at least 1000 stratified annulus samples, got {}",
            id.samples
        );
        worst_identity = worst_identity.max(assert_check(v, "base_lck_identity", 1e-10));
        worst_closed = worst_closed.max(assert_check(v, "base_lee_closed", 1e-12));
        assert!(
            *elapsed < Duration::from_secs(10),
            "base identity ran in {elapsed:?}"
        );
    }
    println!(
        "acceptance 1 base identity: PASS (residual {worst_identity:.3e} < 1e-10, \
         lee closedness {worst_closed:.3e} < 1e-12, n = 2 and 3)"
    );
}

#[test]
fn curvature_has_the_required_structure() {
    let (v, _) = shared(2);
    let support = assert_check(v, "curvature_support", 1e-12);
    let fs = assert_check(v, "curvature_fs_match", 1e-9);
    let restricted = find(v, "curvature_e_restriction");
    assert_eq!(restricted.threshold, -1e-3);
    assert!(restricted.passed, "{}", restricted.detail);
    assert!(
        restricted.samples >= 200,
        "needs at least 200 divisor samples, got {}",
        restricted.samples
    );
    let semi = assert_check(v, "curvature_e_semidefinite", 1e-10);
    let closed = assert_check(v, "curvature_closed", 1e-8);
    println!(
        "acceptance 2 curvature structure: PASS (support {support:.3e} < 1e-12, \
         projective match {fs:.3e} < 1e-9, restriction {:.3e} < -1e-3, \
         semidefinite {semi:.3e}, closedness {closed:.3e} < 1e-8)",
        restricted.observed
    );
}

#[test]
fn blowdown_kernel_is_exactly_the_divisor_tangent() {
    let (v, _) = shared(2);
    let rank = assert_check(v, "kernel_rank", 1e-10);
    let images = assert_check(v, "kernel_images", 1e-12);
    println!(
        "acceptance 3 kernel structure: PASS (second singular value {rank:.3e} <= 1e-10, \
         kernel image norm {images:.3e} < 1e-12)"
    );
}

#[test]
fn gauge_flattens_the_lee_form_near_the_divisor() {
    let (v, _) = shared(2);
    let theta = assert_check(v, "gauge_theta_vanishes", 1e-12);
    let residual = assert_check(v, "gauge_conformal_residual", 1e-8);
    let dtheta = assert_check(v, "gauge_dtheta", 1e-10);
    println!(
        "acceptance 4 gauge: PASS (theta' {theta:.3e} < 1e-12 inside the flat region, \
         conformal residual {residual:.3e} < 1e-8, d theta' {dtheta:.3e} < 1e-10)"
    );
}

#[test]
fn glued_form_is_locally_conformally_kaehler_with_finite_constant() {
    for n in [2usize, 3] {
        let (v, elapsed) = shared(n);
        assert!(
            *elapsed < Duration::from_secs(120),
            "n = {n} ran in {elapsed:?}"
        );
        let constant = v
            .n_constant
            .unwrap_or_else(|| panic!("no finite scaling constant found for n = {n}"));
        let pos = find(v, "positivity");
        assert!(pos.passed, "{}", pos.detail);
        assert!(
            pos.samples >= 1000,
            "needs at least 1000 samples, got {}",
            pos.samples
        );
        assert!(pos.observed > 0.0, "margin {:e}", pos.observed);
        let residual = assert_check(v, "lck_final", 1e-8);
        let degenerate = find(v, "degenerate_directions");
        assert!(degenerate.passed, "{}", degenerate.detail);
        println!(
            "acceptance 5 glued candidate (n = {n}): PASS (N = {constant}, \
             eigenvalue margin {:.3e} > 0 over {} samples, residual {residual:.3e} < 1e-8, \
             took {elapsed:?})",
            pos.observed, pos.samples
        );
    }
}

/// Scalar curvature potential in a blow chart: the honest weight with
/// its pluriharmonic log stripped.
fn potential_scalar(
    bundle: &lck_blowup::bundle::BundleWeight,
    chart: ChartId,
    coords: &[Complex64],
) -> f64 {
    let p = ChartPoint {
        chart,
        coords: coords.to_vec(),
    };
    let w = bundle.weight_value(&p).unwrap();
    match chart {
        ChartId::Base => w,
        ChartId::Blow(j) => w - coords[j].norm_sqr().ln(),
    }
}

#[test]
fn jets_agree_with_independent_richardson_differences() {
    const REL: f64 = 1e-6;
    let mut rng = ChaCha8Rng::seed_from_u64(' ' as u64);
    let mut worst = 0.0f64;
    let mut tested = 0usize;
    for (expr, point) in corpus(&mut rng, 3, 50) {
        let jet: lck_blowup::jets::Jet2 = expr.eval(&point).unwrap();
        let scalar = |x: &[f64]| expr.eval_with::<f64>(x).unwrap();
        let g = fd_grad(scalar, &point, 1e-4);
        let h = fd_hess(scalar, &point, 1e-4);
        for i in 0..3 {
            let dev = (jet.g[i] - g[i]).abs() / (1.0 + g[i].abs());
            assert!(dev <= REL, "corpus gradient deviation {dev:e}");
            worst = worst.max(dev);
            for j in 0..3 {
                let dev = (jet.h[(i, j)] - h[(i, j)]).abs() / (1.0 + h[(i, j)].abs());
                assert!(dev <= REL, "corpus hessian deviation {dev:e}");
                worst = worst.max(dev);
            }
        }
        tested += 1;
    }
    assert!(tested >= 50);

    // The glued weight at transition-zone points, differentiated as a
    // black box and compared against its jet.
    let config = RunConfig::default();
    let (region, bundle) = config.build().unwrap();
    let eps = region.eps;
    for (lead, phase) in [(1.5, 0.3), (1.2, -1.0), (1.8, 2.2)] {
        let z: Vec<Complex64> = region
            .center
            .iter()
            .enumerate()
            .map(|(i, cc)| {
                let m = eps * (lead - 0.2 * i as f64);
                cc + m * c(0.0, phase + 0.7 * i as f64).exp()
            })
            .collect();
        let p = region.to_blow_chart(&z, 0).unwrap();
        let jet = bundle.curvature_potential(&p).unwrap();
        let reals: Vec<f64> = p.coords.iter().flat_map(|z| [z.re, z.im]).collect();
        let chart = p.chart;
        let scalar = |x: &[f64]| {
            let coords: Vec<Complex64> =
                x.chunks(2).map(|pair| c(pair[0], pair[1])).collect();
            potential_scalar(&bundle, chart, &coords)
        };
        let g = fd_grad(scalar, &reals, 1e-4);
        let h = fd_hess(scalar, &reals, 1e-4);
        for i in 0..4 {
            let dev = (jet.g[i] - g[i]).abs() / (1.0 + g[i].abs());
            assert!(dev <= REL, "weight gradient deviation {dev:e}");
            worst = worst.max(dev);
            for j in 0..4 {
                let dev = (jet.h[(i, j)] - h[(i, j)]).abs() / (1.0 + h[(i, j)].abs());
                assert!(dev <= REL, "weight hessian deviation {dev:e}");
                worst = worst.max(dev);
            }
        }
        tested += 1;
    }
    println!(
        "acceptance 6 differentiation integrity: PASS ({tested} expressions, \
         worst relative deviation {worst:.3e} < 1e-6)"
    );
}

#[test]
fn injected_faults_fail_with_the_offending_sample_named() {
    let bin = env!("CARGO_BIN_EXE_lckverify");
    let zero_n = Command::new(bin)
        .args(["verify", "--samples", "20", "--N", "0"])
        .output()
        .expect("binary runs");
    assert_eq!(zero_n.status.code(), Some(1), "zero constant must fail");
    let text = String::from_utf8_lossy(&zero_n.stdout);
    assert!(text.contains("positivity") && text.contains("FAIL"));
    assert!(text.contains("sample"), "offending sample is recorded");

    let shrunk = Command::new(bin)
        .args([
            "verify",
            "--samples",
            "20",
            "--chi-inner-mult",
            "1.2",
            "--chi-outer-mult",
            "1.6",
        ])
        .output()
        .expect("binary runs");
    assert_eq!(shrunk.status.code(), Some(1), "shrunk gauge cutoff must fail");
    let text = String::from_utf8_lossy(&shrunk.stdout);
    assert!(text.contains("support_disjoint") && text.contains("FAIL"));
    assert!(text.contains("sample"), "offending sample is recorded");
    println!(
        "acceptance 7 fault injection: PASS (zero constant and shrunk cutoff \
         both exit 1 naming the offending sample)"
    );
}
