//! Numerical tolerances used across the crate.
//!
//! Two tiers: structural checks on freshly constructed objects sit at
//! 1e-12, while quantities that accumulate rounding through matrix
//! assembly or optimization are compared at 1e-9.

/// Structural checks: normalization, Hermiticity, trace, projector algebra.
pub const STRUCTURAL: f64 = 1e-12;

/// Comparisons of derived quantities (expectation values, bounds, minima).
pub const DERIVED: f64 = 1e-9;

/// Eigenvalue floor accepted for density matrices.
pub const PSD_FLOOR: f64 = 1e-10;

/// Hermiticity tolerance for operators passed to `expectation`.
pub const EXPECT_HERMITICITY: f64 = 1e-10;

/// Largest imaginary residue tolerated in a real expectation value.
pub const EXPECT_IMAG: f64 = 1e-9;

/// LP feasibility: residual bound for reconstructed behaviors and the
/// minimum certificate gap for an infeasibility verdict.
pub const LP_FEASIBILITY: f64 = 1e-8;

/// No-signalling consistency of measured behaviors.
pub const NO_SIGNALLING: f64 = 1e-9;

/// Per-setting outcome distributions must sum to one at this tolerance.
pub const BEHAVIOR_NORMALIZATION: f64 = 1e-10;

/// Convergence threshold for coordinate-ascent optimizers.
pub const OPTIMIZER_CONVERGENCE: f64 = 1e-10;
