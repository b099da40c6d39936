//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by jet arithmetic, chart geometry, and the verification
/// pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// Division of a jet by a jet whose value part is exactly zero.
    #[error("jet division by zero value")]
    JetDivisionByZero,

    /// `ln` of a jet with non-positive value part.
    #[error("jet log of non-positive value {value}")]
    JetLogDomain { value: f64 },

    /// `sqrt` of a jet with non-positive value part; the derivative of
    /// sqrt blows up at 0, so 0 itself is rejected.
    #[error("jet sqrt of non-positive value {value}")]
    JetSqrtDomain { value: f64 },

    /// Chart transition requested through a vanishing coordinate.
    #[error("chart transition through axis {axis} with |u| = {magnitude}")]
    ChartTransition { axis: usize, magnitude: f64 },

    /// A point claimed to lie on the exceptional divisor has t != 0.
    #[error("point not on the exceptional divisor, |t| = {t_abs}")]
    NotOnDivisor { t_abs: f64 },

    /// Quadrature path left the region where the integrand is defined.
    #[error("integration path leaves the valid region at parameter {param}")]
    QuadratureExit { param: f64 },

    /// Cutoff radii out of order or non-positive.
    #[error("cutoff radii must satisfy 0 < inner < outer")]
    BumpRadius,

    /// Region geometry is inconsistent (center outside annulus, polydisc
    /// not contained, and similar).
    #[error("region nesting violated: {0}")]
    RegionNesting(String),

    /// The search for a positivity constant ran past its cap.
    #[error("positivity constant search exhausted: {0}")]
    NSearchExhausted(String),

    /// Invalid run configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// A matrix expected to be Hermitian deviates by more than slack.
    #[error("matrix deviates from Hermitian symmetry by {0}")]
    NonHermitian(f64),

    /// Wedge of forms whose total degree exceeds the space dimension
    /// in a context that does not allow the zero form.
    #[error("form degree overflow: {0} + {1} > {2}")]
    DegreeOverflow(usize, usize, usize),
}

pub type Result<T> = std::result::Result<T, Error>;
