//! Deterministic stratified sampling over the blow-up.
//!
//! Five strata cover the qualitatively different zones: points on the
//! exceptional set, points just off it, the curvature cutoff band, the
//! gauge cutoff band, and the far zone where everything is the plain
//! conformal pullback. Projective coordinates are drawn from a
//! Euclidean ball of radius 4, which keeps the restricted curvature
//! uniformly negative across samples; band points are built in the
//! largest-axis chart so the scaling coordinate is never small there.

use crate::blowup::{ChartPoint, Region};
use crate::tol::NEAR_E_FLOOR;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

/// Radius of the Euclidean ball the projective coordinates range over.
pub const U_BALL_RADIUS: f64 = 4.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stratum {
    OnDivisor,
    NearDivisor,
    BumpBand,
    GaugeBand,
    Far,
}

impl Stratum {
    pub const ALL: [Stratum; 5] = [
        Stratum::OnDivisor,
        Stratum::NearDivisor,
        Stratum::BumpBand,
        Stratum::GaugeBand,
        Stratum::Far,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Stratum::OnDivisor => "on-divisor",
            Stratum::NearDivisor => "near-divisor",
            Stratum::BumpBand => "bump-band",
            Stratum::GaugeBand => "gauge-band",
            Stratum::Far => "far",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Sample {
    pub stratum: Stratum,
    pub point: ChartPoint,
}

fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (TAU * u2).cos()
}

fn unit_direction<R: Rng>(rng: &mut R, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| standard_normal(rng)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-6 {
            return v.iter().map(|x| x / norm).collect();
        }
    }
}

/// Uniform point in the Euclidean ball of the given radius in C^cdim.
fn ball_point<R: Rng>(rng: &mut R, cdim: usize, radius: f64) -> Vec<Complex64> {
    let dim = 2 * cdim;
    let dir = unit_direction(rng, dim);
    let r = radius * rng.gen_range(0.0f64..1.0).powf(1.0 / dim as f64);
    (0..cdim)
        .map(|a| Complex64::new(r * dir[2 * a], r * dir[2 * a + 1]))
        .collect()
}

/// Uniform point in the closed unit disc scaled to the given radius.
fn disc<R: Rng>(rng: &mut R, radius: f64) -> Complex64 {
    let r = radius * rng.gen_range(0.0f64..1.0).sqrt();
    let phi = rng.gen_range(0.0..TAU);
    Complex64::from_polar(r, phi)
}

fn phase<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::from_polar(1.0, rng.gen_range(0.0..TAU))
}

/// A band point in the largest-axis chart: the scaling coordinate has
/// modulus m and every other polydisc coordinate is at most as large.
fn band_point<R: Rng>(rng: &mut R, n: usize, j: usize, m: f64) -> ChartPoint {
    let t = phase(rng) * m;
    let u: Vec<Complex64> = (0..n - 1).map(|_| disc(rng, 1.0)).collect();
    ChartPoint::blow(n, j, t, &u)
}

/// The stratified sample plan. Deterministic in (region, count, seed).
pub fn strata_samples(region: &Region, per_stratum: usize, seed: u64) -> Vec<Sample> {
    let n = region.n;
    let eps = region.eps;
    let mut out = Vec::with_capacity(5 * per_stratum);
    for (si, stratum) in Stratum::ALL.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1 + si as u64));
        for idx in 0..per_stratum {
            let j = idx % n;
            let point = match stratum {
                Stratum::OnDivisor => {
                    let u = ball_point(&mut rng, n - 1, U_BALL_RADIUS);
                    ChartPoint::blow(n, j, Complex64::new(0.0, 0.0), &u)
                }
                Stratum::NearDivisor => {
                    let lo = NEAR_E_FLOOR.ln();
                    let hi = (0.25 * eps).ln();
                    let t_abs = rng.gen_range(lo..hi).exp();
                    let u = ball_point(&mut rng, n - 1, U_BALL_RADIUS);
                    ChartPoint::blow(n, j, phase(&mut rng) * t_abs, &u)
                }
                Stratum::BumpBand => {
                    let m = rng.gen_range(eps..2.0 * eps);
                    band_point(&mut rng, n, j, m)
                }
                Stratum::GaugeBand => {
                    let m = rng.gen_range(2.0 * eps..4.0 * eps);
                    band_point(&mut rng, n, j, m)
                }
                Stratum::Far => {
                    let mut x: Vec<Complex64> = (0..n).map(|_| disc(&mut rng, 1.0)).collect();
                    let mut mx = x.iter().map(|c| c.norm()).fold(0.0f64, f64::max);
                    if mx < 1e-9 {
                        x[0] = Complex64::new(1.0, 0.0);
                        mx = 1.0;
                    }
                    let target = rng.gen_range(4.0 * eps..0.95 * region.polyradius);
                    let z: Vec<Complex64> = x
                        .iter()
                        .zip(&region.center)
                        .map(|(xi, c)| c + xi * (target / mx))
                        .collect();
                    ChartPoint::base(z)
                }
            };
            out.push(Sample {
                stratum: *stratum,
                point,
            });
        }
    }
    out
}

/// Pairs of blow-chart presentations of the same ambient point, all
/// polydisc coordinates inside the cutoff band so both scaling
/// coordinates are comparable and well away from zero.
pub fn consistency_pairs(
    region: &Region,
    count: usize,
    seed: u64,
) -> Vec<(ChartPoint, ChartPoint)> {
    let n = region.n;
    let eps = region.eps;
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(101));
    (0..count)
        .map(|idx| {
            let z: Vec<Complex64> = region
                .center
                .iter()
                .map(|c| {
                    let m = rng.gen_range(1.2 * eps..1.9 * eps);
                    c + phase(&mut rng) * m
                })
                .collect();
            let j = idx % n;
            let k = (idx + 1) % n;
            (
                region.to_blow_chart(&z, j).expect("moduli bounded below"),
                region.to_blow_chart(&z, k).expect("moduli bounded below"),
            )
        })
        .collect()
}

/// Ambient annulus points in radial bands, for the checks that concern
/// the structure before blowing up.
pub fn base_band_points(
    region: &Region,
    bands: usize,
    per_band: usize,
    seed: u64,
) -> Vec<Vec<Complex64>> {
    let n = region.n;
    let lo = region.r_inner * 1.1;
    let hi = region.r_outer * 0.95;
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(211));
    let mut out = Vec::with_capacity(bands * per_band);
    for b in 0..bands {
        let r0 = lo + (hi - lo) * b as f64 / bands as f64;
        let r1 = lo + (hi - lo) * (b + 1) as f64 / bands as f64;
        for _ in 0..per_band {
            let r = rng.gen_range(r0..r1);
            let dir = unit_direction(&mut rng, 2 * n);
            let z: Vec<Complex64> = (0..n)
                .map(|a| Complex64::new(r * dir[2 * a], r * dir[2 * a + 1]))
                .collect();
            out.push(z);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn region(n: usize) -> Region {
        let mut center = vec![Complex64::new(0.0, 0.0); n];
        center[0] = Complex64::new(1.0, 0.0);
        Region::new(center, 0.5, 2.0).unwrap()
    }

    #[test]
    fn strata_land_in_their_zones() {
        let reg = region(3);
        let eps = reg.eps;
        for s in strata_samples(&reg, 40, 7) {
            let x = reg.polydisc_x(&s.point);
            let mx = x.iter().map(|c| c.norm()).fold(0.0f64, f64::max);
            match s.stratum {
                Stratum::OnDivisor => {
                    assert_eq!(s.point.t().norm(), 0.0);
                    assert!(s.point.u_norm_sq() <= U_BALL_RADIUS * U_BALL_RADIUS + 1e-12);
                }
                Stratum::NearDivisor => {
                    let ta = s.point.t().norm();
                    assert!(ta >= NEAR_E_FLOOR * 0.99 && ta <= 0.26 * eps);
                    assert!(mx <= eps * 1.0000001);
                }
                Stratum::BumpBand => {
                    assert!(mx >= eps * 0.999 && mx <= 2.0 * eps * 1.001);
                }
                Stratum::GaugeBand => {
                    assert!(mx >= 2.0 * eps * 0.999 && mx <= 4.0 * eps * 1.001);
                }
                Stratum::Far => {
                    assert!(mx >= 4.0 * eps * 0.999);
                    assert!(reg.in_polydisc(&x));
                    assert!(reg.in_annulus(&s.point.coords));
                }
            }
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let reg = region(2);
        let a = strata_samples(&reg, 10, 42);
        let b = strata_samples(&reg, 10, 42);
        for (sa, sb) in a.iter().zip(&b) {
            assert_eq!(sa.point.coords, sb.point.coords);
        }
        let c = strata_samples(&reg, 10, 43);
        let differs = a
            .iter()
            .zip(&c)
            .any(|(sa, sc)| sa.point.coords != sc.point.coords);
        assert!(differs);
    }

    #[test]
    fn consistency_pairs_name_the_same_point() {
        let reg = region(3);
        for (pj, pk) in consistency_pairs(&reg, 20, 42) {
            let za = reg.ambient(&pj);
            let zb = reg.ambient(&pk);
            for (a, b) in za.iter().zip(&zb) {
                assert!((a - b).norm() < 1e-13);
            }
            // Every polydisc coordinate sits inside the cutoff band.
            for x in reg.polydisc_x(&pj) {
                let m = x.norm();
                assert!(m >= 1.19 * reg.eps && m <= 1.91 * reg.eps);
            }
        }
    }

    #[test]
    fn base_band_points_stay_in_the_annulus() {
        let reg = region(2);
        let pts = base_band_points(&reg, 5, 30, 42);
        assert_eq!(pts.len(), 150);
        for z in pts {
            assert!(reg.in_annulus(&z));
        }
    }
}
