//! Central numerical tolerances.
//!
//! All thresholds used by validation code live here. They are sized for
//! IEEE f64 at dimensions 2n <= 8 with moderate conditioning headroom.

/// Symmetry defect allowed when accepting a matrix as symmetric.
pub const SYM: f64 = 1e-10;

/// Residual allowed in symplecticity and orthogonality tests
/// (`|S^T J S - J|_F`, `|W^T W - I|_F`).
pub const SYMP: f64 = 1e-8;

/// Relative reconstruction residual for matrix factorizations
/// (`|S^T D S - A|_F / |A|_F` and `|W D S - T|_F / |T|_F`).
pub const REC: f64 = 1e-9;

/// Smallest eigenvalue accepted as positive definite.
pub const PD: f64 = 1e-12;

/// Allowed deviation of `|det T|` from 1 for volume-preserving input.
pub const DET: f64 = 1e-8;

/// Spectral gap below which a Williamson spectrum is flagged degenerate.
pub const GAP: f64 = 1e-6;

/// Tolerance for central-symmetry and i-invariance checks on bodies.
pub const BODY_SYM: f64 = 1e-8;

/// Distance below which points merge during convex hull construction.
pub const POINT_MERGE: f64 = 1e-12;

/// Relative Hausdorff target of the ellipsoid-to-polytope approximation.
pub const ELLIPSOID_APPROX: f64 = 0.05;

/// Default relative volume accuracy of the enclosing-ellipsoid solver.
pub const LOEWNER_EPS: f64 = 1e-4;

/// Iteration cap for the enclosing-ellipsoid solver.
pub const LOEWNER_MAX_ITER: usize = 100_000;
