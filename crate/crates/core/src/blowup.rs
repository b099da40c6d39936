//! Charts and transition maps for the blow-up of a polydisc at its
//! center.
//!
//! Ambient points live in an annulus r_inner < |z| < r_outer. The
//! polydisc around the chosen center P carries blow-up charts indexed
//! by an axis j: slot j of the chart coordinates holds t, every other
//! slot i holds u_i, and the blow-down is x_j = t, x_i = t u_i with
//! z = P + x. The base chart uses ambient coordinates directly.
//!
//! Real coordinates interleave as (Re, Im) per complex slot, matching
//! the jet layout used everywhere in this crate.

use crate::error::{Error, Result};
use crate::jets::{CJet, JetLike};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChartId {
    /// Ambient coordinates away from the exceptional set.
    Base,
    /// Blow-up chart whose slot holds the scaling coordinate t.
    Blow(usize),
}

impl fmt::Display for ChartId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChartId::Base => write!(f, "base"),
            ChartId::Blow(j) => write!(f, "blow[{j}]"),
        }
    }
}

/// A point in one chart. Base coordinates are ambient z; blow-chart
/// coordinates put t in slot j and the u's in the remaining slots.
#[derive(Clone, Debug)]
pub struct ChartPoint {
    pub chart: ChartId,
    pub coords: Vec<Complex64>,
}

impl ChartPoint {
    pub fn base(z: Vec<Complex64>) -> Self {
        ChartPoint {
            chart: ChartId::Base,
            coords: z,
        }
    }

    /// Packs t into slot j and `u` (length n-1) into the other slots
    /// in ascending order.
    pub fn blow(n: usize, j: usize, t: Complex64, u: &[Complex64]) -> Self {
        assert!(j < n);
        assert_eq!(u.len(), n - 1);
        let mut coords = vec![Complex64::new(0.0, 0.0); n];
        coords[j] = t;
        let mut k = 0;
        for (i, slot) in coords.iter_mut().enumerate() {
            if i != j {
                *slot = u[k];
                k += 1;
            }
        }
        ChartPoint {
            chart: ChartId::Blow(j),
            coords,
        }
    }

    pub fn n(&self) -> usize {
        self.coords.len()
    }

    /// The scaling coordinate of a blow chart.
    pub fn t(&self) -> Complex64 {
        match self.chart {
            ChartId::Blow(j) => self.coords[j],
            ChartId::Base => panic!("base chart has no scaling coordinate"),
        }
    }

    /// (slot, u) pairs of a blow chart in ascending slot order.
    pub fn u_slots(&self) -> Vec<(usize, Complex64)> {
        match self.chart {
            ChartId::Blow(j) => (0..self.n())
                .filter(|&i| i != j)
                .map(|i| (i, self.coords[i]))
                .collect(),
            ChartId::Base => panic!("base chart has no projective slots"),
        }
    }

    pub fn u_norm_sq(&self) -> f64 {
        self.u_slots().iter().map(|(_, u)| u.norm_sqr()).sum()
    }
}

/// The annulus, center, and nested radii every run works inside.
#[derive(Clone, Debug)]
pub struct Region {
    pub n: usize,
    pub center: Vec<Complex64>,
    pub r_inner: f64,
    pub r_outer: f64,
    /// Half-width of the polydisc around the center, per coordinate.
    pub polyradius: f64,
    /// Inner radius of the curvature cutoff; its support ends at 2 eps
    /// and the gauge cutoff spans 3 eps to 4 eps.
    pub eps: f64,
}

fn norm(z: &[Complex64]) -> f64 {
    z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

impl Region {
    pub fn new(center: Vec<Complex64>, r_inner: f64, r_outer: f64) -> Result<Self> {
        let n = center.len();
        if !(2..=6).contains(&n) {
            return Err(Error::Config(format!(
                "complex dimension must be between 2 and 6, got {n}"
            )));
        }
        if !(r_inner.is_finite() && r_outer.is_finite()) || r_inner <= 0.0 {
            return Err(Error::Config(
                "annulus radii must be finite and positive".into(),
            ));
        }
        if r_inner >= r_outer {
            return Err(Error::Config(format!(
                "annulus radii must nest: inner {r_inner} outer {r_outer}"
            )));
        }
        let dist = norm(&center);
        if dist <= r_inner || dist >= r_outer {
            return Err(Error::Config(format!(
                "center modulus {dist} must lie strictly inside the annulus"
            )));
        }
        let slack = (dist - r_inner).min(r_outer - dist);
        let polyradius = 0.9 * slack / (n as f64).sqrt();
        let eps = polyradius / 8.0;
        Ok(Region {
            n,
            center,
            r_inner,
            r_outer,
            polyradius,
            eps,
        })
    }

    /// Overrides the cutoff scale; the gauge cutoff must still close
    /// off inside the polydisc.
    pub fn with_eps(mut self, eps: f64) -> Result<Self> {
        if eps.is_nan() || eps <= 0.0 || 4.0 * eps > self.polyradius {
            return Err(Error::Config(format!(
                "eps {eps} must satisfy 0 < 4 eps <= polyradius {}",
                self.polyradius
            )));
        }
        self.eps = eps;
        Ok(self)
    }

    /// Polydisc offsets x with z = P + x, by the blow-down in blow
    /// charts.
    pub fn polydisc_x(&self, p: &ChartPoint) -> Vec<Complex64> {
        match p.chart {
            ChartId::Base => p
                .coords
                .iter()
                .zip(&self.center)
                .map(|(z, c)| z - c)
                .collect(),
            ChartId::Blow(j) => {
                let t = p.coords[j];
                (0..p.n())
                    .map(|i| if i == j { t } else { t * p.coords[i] })
                    .collect()
            }
        }
    }

    /// Ambient coordinates of a chart point.
    pub fn ambient(&self, p: &ChartPoint) -> Vec<Complex64> {
        match p.chart {
            ChartId::Base => p.coords.clone(),
            _ => self
                .polydisc_x(p)
                .iter()
                .zip(&self.center)
                .map(|(x, c)| x + c)
                .collect(),
        }
    }

    pub fn in_annulus(&self, z: &[Complex64]) -> bool {
        let d = norm(z);
        self.r_inner < d && d < self.r_outer
    }

    pub fn in_polydisc(&self, x: &[Complex64]) -> bool {
        x.iter().all(|c| c.norm() < self.polyradius)
    }

    /// Moves an ambient point into blow chart j. Fails on the axis
    /// hyperplane x_j = 0 where the chart does not reach.
    pub fn to_blow_chart(&self, z: &[Complex64], j: usize) -> Result<ChartPoint> {
        let x: Vec<Complex64> = z.iter().zip(&self.center).map(|(z, c)| z - c).collect();
        let t = x[j];
        if t.norm() == 0.0 {
            return Err(Error::ChartTransition {
                axis: j,
                magnitude: 0.0,
            });
        }
        let mut coords = vec![Complex64::new(0.0, 0.0); x.len()];
        coords[j] = t;
        for (i, slot) in coords.iter_mut().enumerate() {
            if i != j {
                *slot = x[i] / t;
            }
        }
        Ok(ChartPoint {
            chart: ChartId::Blow(j),
            coords,
        })
    }

    /// Chart-to-chart transition on the blow-up.
    pub fn transition(&self, p: &ChartPoint, target: ChartId) -> Result<ChartPoint> {
        match (p.chart, target) {
            (ChartId::Base, ChartId::Base) => Ok(p.clone()),
            (ChartId::Blow(j), ChartId::Blow(k)) if j == k => Ok(p.clone()),
            (ChartId::Base, ChartId::Blow(j)) => self.to_blow_chart(&p.coords, j),
            (ChartId::Blow(_), ChartId::Base) => {
                let t = p.t();
                if t.norm() == 0.0 {
                    return Err(Error::NotOnDivisor { t_abs: 0.0 });
                }
                Ok(ChartPoint::base(self.ambient(p)))
            }
            (ChartId::Blow(j), ChartId::Blow(k)) => {
                let uk = p.coords[k];
                if uk.norm() == 0.0 {
                    return Err(Error::ChartTransition {
                        axis: k,
                        magnitude: 0.0,
                    });
                }
                let t = p.coords[j];
                let n = p.n();
                let mut coords = vec![Complex64::new(0.0, 0.0); n];
                coords[k] = t * uk;
                coords[j] = uk.inv();
                for (i, slot) in coords.iter_mut().enumerate() {
                    if i != j && i != k {
                        *slot = p.coords[i] / uk;
                    }
                }
                Ok(ChartPoint {
                    chart: ChartId::Blow(k),
                    coords,
                })
            }
        }
    }

    /// Complex Jacobian of the blow-down x(chart coords), rows indexed
    /// by polydisc coordinates, columns by chart slots.
    pub fn blowdown_jacobian(&self, p: &ChartPoint) -> DMatrix<Complex64> {
        let n = p.n();
        match p.chart {
            ChartId::Base => DMatrix::identity(n, n),
            ChartId::Blow(j) => {
                let t = p.coords[j];
                let mut m = DMatrix::zeros(n, n);
                m[(j, j)] = Complex64::new(1.0, 0.0);
                for i in 0..n {
                    if i != j {
                        m[(i, j)] = p.coords[i];
                        m[(i, i)] = t;
                    }
                }
                m
            }
        }
    }

    /// Complex Jacobian of the transition between blow charts, rows
    /// indexed by target slots, columns by source slots.
    pub fn transition_jacobian(&self, p: &ChartPoint, target: usize) -> Result<DMatrix<Complex64>> {
        let j = match p.chart {
            ChartId::Blow(j) => j,
            ChartId::Base => {
                return Err(Error::Config(
                    "transition Jacobian needs a blow-chart source".into(),
                ))
            }
        };
        if j == target {
            return Ok(DMatrix::identity(p.n(), p.n()));
        }
        let uk = p.coords[target];
        if uk.norm() == 0.0 {
            return Err(Error::ChartTransition {
                axis: target,
                magnitude: 0.0,
            });
        }
        let t = p.coords[j];
        let n = p.n();
        let inv = uk.inv();
        let inv2 = inv * inv;
        let mut m = DMatrix::zeros(n, n);
        // Target slot `target` holds t' = t u_k.
        m[(target, j)] = uk;
        m[(target, target)] = t;
        // Target slot j holds u'_j = 1 / u_k.
        m[(j, target)] = -inv2;
        for i in 0..n {
            if i != j && i != target {
                // u'_i = u_i / u_k.
                m[(i, i)] = inv;
                m[(i, target)] = -p.coords[i] * inv2;
            }
        }
        Ok(m)
    }

    /// Jacobian of the projection to the projective coordinates u,
    /// rows in ascending u-slot order, columns over chart slots.
    pub fn projection_jacobian(&self, p: &ChartPoint) -> Result<DMatrix<Complex64>> {
        let j = match p.chart {
            ChartId::Blow(j) => j,
            ChartId::Base => {
                return Err(Error::Config(
                    "projection needs a blow-chart point".into(),
                ))
            }
        };
        let n = p.n();
        let mut m = DMatrix::zeros(n - 1, n);
        let mut row = 0;
        for i in 0..n {
            if i != j {
                m[(row, i)] = Complex64::new(1.0, 0.0);
                row += 1;
            }
        }
        Ok(m)
    }

    /// Real basis of the tangent space of the exceptional set at a
    /// point with t = 0: the u-directions of the chart.
    pub fn exceptional_tangent(&self, p: &ChartPoint) -> Result<Vec<DVector<f64>>> {
        let j = match p.chart {
            ChartId::Blow(j) => j,
            ChartId::Base => {
                return Err(Error::NotOnDivisor {
                    t_abs: f64::INFINITY,
                });
            }
        };
        let t_abs = p.coords[j].norm();
        if t_abs != 0.0 {
            return Err(Error::NotOnDivisor { t_abs });
        }
        let n = p.n();
        let mut basis = Vec::with_capacity(2 * (n - 1));
        for i in 0..n {
            if i != j {
                for off in 0..2 {
                    let mut v = DVector::zeros(2 * n);
                    v[2 * i + off] = 1.0;
                    basis.push(v);
                }
            }
        }
        Ok(basis)
    }

    /// Chart coordinates as complex jets seeded at the point.
    pub fn chart_cjets<S: JetLike>(&self, p: &ChartPoint) -> Vec<CJet<S>> {
        let n = p.n();
        (0..n)
            .map(|a| CJet::seed_slot(2 * n, a, p.coords[a]))
            .collect()
    }

    /// Ambient coordinates as jets in the chart's variables.
    pub fn ambient_cjets<S: JetLike>(&self, p: &ChartPoint) -> Vec<CJet<S>> {
        let x = self.polydisc_cjets::<S>(p);
        x.into_iter()
            .zip(&self.center)
            .map(|(xi, c)| xi.add_complex(*c))
            .collect()
    }

    /// Polydisc offsets as jets in the chart's variables.
    pub fn polydisc_cjets<S: JetLike>(&self, p: &ChartPoint) -> Vec<CJet<S>> {
        let chart = self.chart_cjets::<S>(p);
        match p.chart {
            ChartId::Base => chart
                .into_iter()
                .zip(&self.center)
                .map(|(z, c)| z.add_complex(-c))
                .collect(),
            ChartId::Blow(j) => {
                let t = chart[j].clone();
                (0..p.n())
                    .map(|i| if i == j { t.clone() } else { &t * &chart[i] })
                    .collect()
            }
        }
    }
}

/// Index of the largest-modulus polydisc coordinate; the blow chart on
/// that axis keeps |u| <= 1 and |t| as large as possible.
pub fn argmax_axis(x: &[Complex64]) -> usize {
    let mut best = 0;
    let mut best_m = -1.0;
    for (i, c) in x.iter().enumerate() {
        let m = c.norm();
        if m > best_m {
            best_m = m;
            best = i;
        }
    }
    best
}

/// Pullback of a Hermitian coefficient matrix along a holomorphic map
/// with complex Jacobian `jac`. The coefficient convention contracts
/// the first index against holomorphic components, so the chain rule
/// for d2/dz dzbar reads transpose(J) H conj(J).
pub fn pullback_herm(h: &DMatrix<Complex64>, jac: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    jac.transpose() * h * jac.conjugate()
}

/// The real 2n x 2n Jacobian of the underlying real map, blockwise
/// [[Re, -Im], [Im, Re]] per complex entry, in interleaved layout.
pub fn realify_jacobian(jac: &DMatrix<Complex64>) -> DMatrix<f64> {
    let (r, c) = jac.shape();
    let mut m = DMatrix::zeros(2 * r, 2 * c);
    for a in 0..r {
        for b in 0..c {
            let z = jac[(a, b)];
            m[(2 * a, 2 * b)] = z.re;
            m[(2 * a, 2 * b + 1)] = -z.im;
            m[(2 * a + 1, 2 * b)] = z.im;
            m[(2 * a + 1, 2 * b + 1)] = z.re;
        }
    }
    m
}

/// Covariant pullback of real 1-form coefficients: transpose(J_real) v.
pub fn pullback_oneform(values: &[f64], jac: &DMatrix<Complex64>) -> Vec<f64> {
    let jr = realify_jacobian(jac);
    let v = DVector::from_column_slice(values);
    let out = jr.transpose() * v;
    out.iter().copied().collect()
}

/// Fubini-Study coefficient matrix in an affine chart:
/// H_ab = (delta_ab (1 + |u|^2) - conj(u_a) u_b) / (1 + |u|^2)^2.
pub fn fubini_study(u: &[Complex64]) -> DMatrix<Complex64> {
    let m = u.len();
    let s = 1.0 + u.iter().map(|c| c.norm_sqr()).sum::<f64>();
    let s2 = s * s;
    DMatrix::from_fn(m, m, |a, b| {
        let mut v = -u[a].conj() * u[b];
        if a == b {
            v += Complex64::new(s, 0.0);
        }
        v / s2
    })
}
