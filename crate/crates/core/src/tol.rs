//! Default numerical thresholds.

/// Relative singular-value threshold for rank decisions.
pub const RANK: f64 = 1e-8;
/// Smallest admissible leading principal minor for Gauss factorization.
pub const MINOR: f64 = 1e-10;
/// |det g − 1| allowed for group elements.
pub const DET: f64 = 1e-9;
/// Exact-algebra equality checks.
pub const EQ: f64 = 1e-9;
/// Checks that go through finite differences.
pub const FD: f64 = 1e-6;
/// Central-difference step.
pub const FD_STEP: f64 = 1e-5;
/// Samplers redraw when a Gauss minor falls below this.
pub const BOUNDARY_MINOR: f64 = 1e-4;
