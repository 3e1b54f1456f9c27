//! Shared numeric tolerances.

/// Structural checks: probability sums, pin totals, equality predicates.
pub const STRUCTURAL: f64 = 1e-12;
/// Residual bound for exactly solved values.
pub const SOLVED: f64 = 1e-10;
/// Agreement between two independent computation routes.
pub const CROSS_ORACLE: f64 = 1e-8;
/// Default membership tolerance for restricted spaces.
pub const MEMBERSHIP: f64 = 1e-9;
/// Row sums accepted when loading files; rows are renormalized afterwards.
pub const LOAD: f64 = 1e-9;
