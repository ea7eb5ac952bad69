//! Numeric tolerances used across the crate.
//!
//! Supports stay small (at most a few hundred joint cells), so accumulated
//! f64 rounding error sits orders of magnitude below these thresholds. The
//! values are part of the public contract: validation, certificates, and the
//! verification suites all compare against them, never against ad-hoc
//! constants.

/// Structural identities: row sums, total mass, bound slacks, certificate
/// boundaries. Anything that is an exact identity in real arithmetic must
/// hold to within this after f64 evaluation.
pub const STRUCTURAL: f64 = 1e-12;

/// Derived comparisons that pass through a ratio, e.g. conditional
/// probabilities compared across conditioning events.
pub const DERIVED: f64 = 1e-10;

/// Reorderings of one finite sum (marginalizing in a different axis order).
pub const SUMMATION: f64 = 1e-14;
