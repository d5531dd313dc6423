//! Numerical tolerances shared across the crate.

/// Additive slack when checking boost-sequence conditions.
pub const VALIDATION: f64 = 1e-12;

/// Relative tolerance of the canonical-offset root finder.
pub const ROOT_RELATIVE: f64 = 1e-10;

/// Default absolute tolerance for the `c_a` integral.
pub const QUADRATURE: f64 = 1e-4;

/// Largest overshoot of `alpha` over wealth, relative to the total budget,
/// that the engine attributes to rounding and absorbs.
pub const WEALTH_ROUNDING: f64 = 1e-12;
