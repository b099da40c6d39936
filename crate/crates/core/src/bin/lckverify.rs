//! Command line front end: run the verification battery, sweep it
//! over a parameter grid, or cross-check the jet arithmetic against
//! finite differences.
//!
//! Exit codes: 0 all checks passed, 1 a check failed, 2 the
//! configuration was rejected, 3 an internal evaluation error.

use clap::{Args, Parser, Subcommand};
use lck_blowup::blowup::{ChartId, ChartPoint};
use lck_blowup::config::RunConfig;
use lck_blowup::error::Error;
use lck_blowup::fd::{corpus, richardson_grad, richardson_hess};
use lck_blowup::jets::{Jet2, Jet3};
use lck_blowup::lck::verify::{run_verification, Verification};
use lck_blowup::potential::ddbar_from_hess;
use lck_blowup::report::Report;
use lck_blowup::tol::{DELTA_DEFAULT, FD_REL, FD_STEP, TOL_ANALYTIC, TOL_GLUED};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "lckverify",
    version,
    about = "Certifies the glued locally conformally Kähler structure on a blown-up annulus chart."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the full check battery and optionally write a JSON report.
    Verify(VerifyArgs),
    /// Run the battery over a grid of dimensions and gluing radii.
    Sweep(SweepArgs),
    /// Cross-check jet arithmetic and glued weights against finite differences.
    Selftest(SelftestArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Complex dimension of the ambient chart (2 to 6).
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Inner annulus radius.
    #[arg(long, default_value_t = 0.5)]
    r_inner: f64,
    /// Outer annulus radius.
    #[arg(long, default_value_t = 2.0)]
    r_outer: f64,
    /// Modulus of the blow-up center on the first axis.
    #[arg(long, default_value_t = 1.0)]
    center: f64,
    /// Gluing radius; defaults to an eighth of the chart radius.
    #[arg(long)]
    eps: Option<f64>,
    /// Sample count per stratum.
    #[arg(long, default_value_t = 200)]
    samples: usize,
    /// Seed for the sample plan.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Tolerance for closed-form identities on the annulus.
    #[arg(long, default_value_t = TOL_ANALYTIC)]
    tol_analytic: f64,
    /// Tolerance for identities of the glued data.
    #[arg(long, default_value_t = TOL_GLUED)]
    tol_glued: f64,
    /// Relative eigenvalue margin required of the glued candidate.
    #[arg(long, default_value_t = DELTA_DEFAULT)]
    delta: f64,
    /// Fix the positivity constant instead of searching for it.
    #[arg(long = "N")]
    n_override: Option<u64>,
    /// Inner radius multiple for the gauge cutoff.
    #[arg(long, default_value_t = 3.0)]
    chi_inner_mult: f64,
    /// Outer radius multiple for the gauge cutoff.
    #[arg(long, default_value_t = 4.0)]
    chi_outer_mult: f64,
    /// Evaluate the ambient potential by path quadrature instead of
    /// the closed form.
    #[arg(long)]
    quadrature: bool,
}

impl CommonArgs {
    fn to_config(&self) -> RunConfig {
        RunConfig {
            n: self.n,
            r_inner: self.r_inner,
            r_outer: self.r_outer,
            center: self.center,
            eps: self.eps,
            samples: self.samples,
            seed: self.seed,
            tol_analytic: self.tol_analytic,
            tol_glued: self.tol_glued,
            delta: self.delta,
            n_override: self.n_override,
            chi_inner_mult: self.chi_inner_mult,
            chi_outer_mult: self.chi_outer_mult,
            quadrature: self.quadrature,
        }
    }
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Write the JSON report to this path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Dimensions to sweep (comma separated).
    #[arg(long, value_delimiter = ',', default_value = "2,3")]
    sweep_n: Vec<usize>,
    /// Gluing radii to sweep, as fractions of the chart radius.
    #[arg(long, value_delimiter = ',', default_value = "0.0625,0.125")]
    sweep_eps: Vec<f64>,
    /// Write all JSON reports to this path as an array.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SelftestArgs {
    /// Seed for the expression corpus.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Number of random expressions to test.
    #[arg(long, default_value_t = 48)]
    count: usize,
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::RegionNesting(_) | Error::BumpRadius => 2,
        _ => 3,
    }
}

fn print_checks(v: &Verification) {
    for c in &v.checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        println!(
            "{:<28} {:<4} observed {:>12.3e}  threshold {:>9.1e}  samples {:>5}",
            c.name, status, c.observed, c.threshold, c.samples
        );
        if !c.passed {
            println!("    {}", c.detail);
        }
    }
    match (v.passed, v.n_constant) {
        (true, Some(n)) => println!("result: PASS (N = {n})"),
        (true, None) => println!("result: PASS"),
        (false, _) => {
            let failed = v.checks.iter().filter(|c| !c.passed).count();
            println!("result: FAIL ({failed} checks failed)");
        }
    }
}

fn write_text(path: &PathBuf, text: &str) -> i32 {
    match std::fs::write(path, text) {
        Ok(()) => {
            println!("report: {}", path.display());
            0
        }
        Err(e) => {
            eprintln!("error: cannot write {}: {e}", path.display());
            3
        }
    }
}

fn cmd_verify(args: VerifyArgs) -> i32 {
    let config = args.common.to_config();
    let verification = match run_verification(config.clone()) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code_for(&e);
        }
    };
    print_checks(&verification);
    if let Some(out) = &args.out {
        let report = Report::new(config, &verification);
        let code = write_text(out, &report.to_json());
        if code != 0 {
            return code;
        }
    }
    if verification.passed {
        0
    } else {
        1
    }
}

fn cmd_sweep(args: SweepArgs) -> i32 {
    let mut reports = Vec::new();
    let mut any_failed = false;
    for &n in &args.sweep_n {
        for &frac in &args.sweep_eps {
            let mut config = args.common.to_config();
            config.n = n;
            config.eps = None;
            let radius = match config.build() {
                Ok((region, _)) => region.polyradius,
                Err(e) => {
                    eprintln!("error: n = {n}: {e}");
                    return exit_code_for(&e);
                }
            };
            config.eps = Some(frac * radius);
            let verification = match run_verification(config.clone()) {
                Ok(v) => v,
                Err(e) => {
                    eprintln!("error: n = {n}, eps fraction {frac}: {e}");
                    return exit_code_for(&e);
                }
            };
            let status = if verification.passed { "PASS" } else { "FAIL" };
            let n_text = verification
                .n_constant
                .map(|v| v.to_string())
                .unwrap_or_else(|| "-".to_string());
            println!(
                "n = {n}  eps = {:.5} (fraction {frac})  {status}  N = {n_text}",
                frac * radius
            );
            for c in verification.checks.iter().filter(|c| !c.passed) {
                println!("    {} observed {:.3e}: {}", c.name, c.observed, c.detail);
            }
            any_failed |= !verification.passed;
            reports.push(Report::new(config, &verification));
        }
    }
    if let Some(out) = &args.out {
        let text = serde_json::to_string_pretty(&reports).expect("reports serialize");
        let code = write_text(out, &text);
        if code != 0 {
            return code;
        }
    }
    if any_failed {
        1
    } else {
        0
    }
}

/// Largest relative deviation between two derivative listings.
fn relative_dev(lhs: &[f64], rhs: &[f64]) -> f64 {
    lhs.iter()
        .zip(rhs)
        .map(|(a, b)| (a - b).abs() / (1.0 + b.abs()))
        .fold(0.0, f64::max)
}

fn selftest_corpus(seed: u64, count: usize) -> Result<(f64, f64, f64), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = 3;
    let mut worst_grad = 0.0f64;
    let mut worst_hess = 0.0f64;
    let mut worst_third = 0.0f64;
    for (expr, point) in corpus(&mut rng, dim, count) {
        let jet: Jet2 = expr.eval(&point).map_err(|e| e.to_string())?;
        let scalar = |x: &[f64]| expr.eval_with::<f64>(x).expect("domain-safe corpus");
        let fd_g = richardson_grad(scalar, &point, FD_STEP);
        worst_grad = worst_grad.max(relative_dev(jet.g.as_slice(), &fd_g));
        let fd_h = richardson_hess(scalar, &point, FD_STEP);
        worst_hess = worst_hess.max(relative_dev(jet.h.as_slice(), fd_h.as_slice()));
        let j3: Jet3 = expr.eval(&point).map_err(|e| e.to_string())?;
        worst_grad = worst_grad.max(relative_dev(j3.g.as_slice(), &fd_g));
        // Third derivatives against centered differences of exact
        // second-order jets.
        for i in 0..dim {
            let mut plus = point.clone();
            plus[i] += FD_STEP;
            let mut minus = point.clone();
            minus[i] -= FD_STEP;
            let hp: Jet2 = expr.eval(&plus).map_err(|e| e.to_string())?;
            let hm: Jet2 = expr.eval(&minus).map_err(|e| e.to_string())?;
            for j in 0..dim {
                for k in 0..dim {
                    let fd = (hp.h[(j, k)] - hm.h[(j, k)]) / (2.0 * FD_STEP);
                    let dev = (j3.third(i, j, k) - fd).abs() / (1.0 + fd.abs());
                    worst_third = worst_third.max(dev);
                }
            }
        }
    }
    Ok((worst_grad, worst_hess, worst_third))
}

fn selftest_weight(n: usize) -> Result<f64, String> {
    let config = RunConfig {
        n,
        ..RunConfig::default()
    };
    let (region, bundle) = config.build().map_err(|e| e.to_string())?;
    let eps = region.eps;
    let mut worst = 0.0f64;
    // Probe points inside the gluing transition band where every
    // branch of the weight is active.
    for (scale, phase) in [(1.5, 0.0), (1.3, 0.8), (1.7, -1.1)] {
        let z: Vec<Complex64> = region
            .center
            .iter()
            .enumerate()
            .map(|(i, cc)| {
                let m = eps * (scale - 0.2 * i as f64);
                cc + m * Complex64::new(0.0, phase + 0.3 * i as f64).exp()
            })
            .collect();
        let p = region.to_blow_chart(&z, 0).map_err(|e| e.to_string())?;
        let jet = bundle.curvature(&p).map_err(|e| e.to_string())?.matrix;
        let coords = p.coords.clone();
        let reals: Vec<f64> = coords.iter().flat_map(|c| [c.re, c.im]).collect();
        let value = |x: &[f64]| {
            let cs: Vec<Complex64> = x
                .chunks(2)
                .map(|pair| Complex64::new(pair[0], pair[1]))
                .collect();
            let q = ChartPoint {
                chart: ChartId::Blow(0),
                coords: cs,
            };
            bundle.weight_value(&q).expect("probe stays in chart")
        };
        let hess = richardson_hess(value, &reals, FD_STEP);
        let fd = ddbar_from_hess(&hess);
        for a in 0..n {
            for b in 0..n {
                let dev = (fd[(a, b)] - jet[(a, b)]).norm() / (1.0 + jet[(a, b)].norm());
                worst = worst.max(dev);
            }
        }
    }
    Ok(worst)
}

fn cmd_selftest(args: SelftestArgs) -> i32 {
    let mut failed = false;
    match selftest_corpus(args.seed, args.count) {
        Ok((g, h, t)) => {
            let ok = g <= FD_REL && h <= 100.0 * FD_REL && t <= 1e-4;
            failed |= !ok;
            println!(
                "corpus ({} expressions): grad dev {:.3e}, hess dev {:.3e}, third dev {:.3e} ... {}",
                args.count,
                g,
                h,
                t,
                if ok { "PASS" } else { "FAIL" }
            );
        }
        Err(e) => {
            eprintln!("error: corpus selftest: {e}");
            return 3;
        }
    }
    for n in [2usize, 3] {
        match selftest_weight(n) {
            Ok(dev) => {
                let ok = dev <= 1e-4;
                failed |= !ok;
                println!(
                    "glued weight n = {n}: worst curvature entry dev {:.3e} ... {}",
                    dev,
                    if ok { "PASS" } else { "FAIL" }
                );
            }
            Err(e) => {
                eprintln!("error: weight selftest n = {n}: {e}");
                return 3;
            }
        }
    }
    if failed {
        1
    } else {
        0
    }
}

fn main() {
    let cli = Cli::parse();
    let code = match cli.cmd {
        Cmd::Verify(a) => cmd_verify(a),
        Cmd::Sweep(a) => cmd_sweep(a),
        Cmd::Selftest(a) => cmd_selftest(a),
    };
    std::process::exit(code);
}
