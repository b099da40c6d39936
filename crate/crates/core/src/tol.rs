//! Shared numeric tolerances and margins.
//!
//! Residuals are measured in the coefficient sup norm at unit-scale
//! coordinates. "Analytic" identities go through closed-form fields
//! only; "glued" identities pass through bump-function derivatives,
//! which are large near the support edges.

/// Residuals of closed-form identities.
pub const TOL_ANALYTIC: f64 = 1e-10;

/// Residuals of identities that differentiate glued bump functions.
pub const TOL_GLUED: f64 = 1e-8;

/// Quantities that vanish by exact construction or support disjointness.
pub const TOL_EXACT: f64 = 1e-12;

/// Closedness of the Lee form and of gauge-shifted Lee forms.
pub const TOL_LEE_CLOSED: f64 = 1e-12;

/// Exterior derivative of gauge 1-form data.
pub const TOL_DTHETA: f64 = 1e-10;

/// Entry agreement of the curvature with the projective pullback.
pub const TOL_FS_MATCH: f64 = 1e-9;

/// Chart-to-chart agreement of curvature after Jacobian conjugation.
pub const TOL_CHART_CONSISTENCY: f64 = 1e-9;

/// Eigenvalue accuracy contract of the symmetric solver.
pub const TOL_EIGEN: f64 = 1e-10;

/// Hermitian-deviation slack accepted before rejecting a matrix.
pub const HERMITIAN_SLACK: f64 = 1e-12;

/// Rank cut for singular values of the blow-down differential.
pub const SV_RANK_CUT: f64 = 1e-10;

/// Semidefiniteness slack for the curvature at divisor points.
pub const TOL_SEMIDEFINITE: f64 = 1e-10;

/// Strict-negativity margin for the curvature restricted to the divisor.
pub const E_NEGATIVE_MARGIN: f64 = -1e-3;

/// Relative agreement required between jets and finite differences.
pub const FD_REL: f64 = 1e-6;

/// Base step for Richardson-extrapolated central differences.
pub const FD_STEP: f64 = 1e-4;

/// Default positivity margin, relative to the trace of the gauge form.
pub const DELTA_DEFAULT: f64 = 1e-8;

/// Absolute error target of the Lee-potential quadrature.
pub const QUADRATURE_TOL: f64 = 1e-10;

/// Smallest |t| used when sampling the shell around the divisor.
pub const NEAR_E_FLOOR: f64 = 1e-6;

/// Cap of the doubling search for the positivity constant.
pub const N_SEARCH_CAP: u64 = 1 << 30;
