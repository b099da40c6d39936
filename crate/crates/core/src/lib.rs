//! Numerical certification that the blow-up of a locally conformally
//! Kähler surface at a point carries a locally conformally Kähler
//! structure again.
//!
//! The crate builds the blow-up of an annular chart in C^n at an interior
//! point, glues a Hermitian metric on the exceptional line bundle from a
//! Euclidean and a trivial piece, computes the curvature of that metric
//! through third-order automatic differentiation, flattens the Lee form
//! near the exceptional divisor by a conformal gauge, and searches for a
//! constant N making N ω' - Ω positive away from the divisor directions.
//! Every analytic identity used along the way is re-checked numerically
//! at stratified sample points, against finite differences, and against
//! closed-form special cases.

pub mod blowup;
pub mod bundle;
pub mod config;
pub mod error;
pub mod fd;
pub mod forms;
pub mod jets;
pub mod lck;
pub mod linalg;
pub mod potential;
pub mod report;
pub mod tol;

pub use error::{Error, Result};
