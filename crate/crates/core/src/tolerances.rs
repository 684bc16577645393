//! Numeric tolerances, pinned in one place.
//!
//! Each constant is part of the toolkit's numeric contract: runtime checks
//! and the acceptance suite both read from here, so loosening a bound is a
//! visible, reviewable change rather than a scattered test edit.

/// Basis vectors must be pairwise orthonormal to this precision.
/// Construction is exact rational-over-sqrt arithmetic, so anything above
/// a few ulps indicates a sign or indexing bug.
pub const ORTHONORMALITY: f64 = 1e-12;

/// Norm deviation allowed immediately after preparing a state.
pub const STATE_NORM: f64 = 1e-12;

/// Per-edge probabilities of a reading must sum to 1 within this bound.
pub const PROBABILITY_SUM: f64 = 1e-10;

/// Cumulative norm drift allowed over a long evolution (1000 steps).
pub const NORM_DRIFT: f64 = 1e-10;

/// Residual of a basis image outside its span before the subspace is
/// declared non-invariant. 100x accumulated double rounding at N <= 1e4.
pub const INVARIANCE_RESIDUAL: f64 = 1e-10;

/// Unitarity defect allowed for a derived reduced matrix (M^dagger M - I).
pub const MATRIX_UNITARITY: f64 = 1e-10;

/// Agreement between reduced evolution and the projected full simulation.
pub const REDUCTION_EQUIVALENCE: f64 = 1e-9;

/// Agreement between the closed-form eigenvalue route (deflation plus
/// palindromic quadratics) and the generic dense eigensolver.
pub const EIGENVALUE_AGREEMENT: f64 = 1e-9;

/// Eigenvalues of a unitary matrix must sit on the unit circle.
pub const EIGENVALUE_MODULUS: f64 = 1e-10;

/// Base tolerance for matching the derived matrix's characteristic
/// polynomial against the closed form; scaled as max(this, 1e-12 * N).
pub const CHAR_POLY_MATCH: f64 = 1e-9;

/// Size-aware characteristic-polynomial tolerance for `prongs`-prong stars.
pub fn char_poly_tolerance(prongs: usize) -> f64 {
    CHAR_POLY_MATCH.max(1e-12 * prongs as f64)
}

/// |p(-1)| for the characteristic polynomial (exact algebraic root).
pub const MINUS_ONE_ROOT: f64 = 1e-12;

/// Vieta identities on the two reduced frequencies.
pub const VIETA: f64 = 1e-12;

/// Residual of an eigenvector after inverse iteration, ||Mv - lambda v||.
pub const EIGENVECTOR_RESIDUAL: f64 = 1e-9;

/// Every tolerance with its name, for output-file metadata blocks.
pub fn summary() -> [(&'static str, f64); 13] {
    [
        ("orthonormality", ORTHONORMALITY),
        ("state_norm", STATE_NORM),
        ("probability_sum", PROBABILITY_SUM),
        ("norm_drift", NORM_DRIFT),
        ("invariance_residual", INVARIANCE_RESIDUAL),
        ("matrix_unitarity", MATRIX_UNITARITY),
        ("reduction_equivalence", REDUCTION_EQUIVALENCE),
        ("eigenvalue_agreement", EIGENVALUE_AGREEMENT),
        ("eigenvalue_modulus", EIGENVALUE_MODULUS),
        ("char_poly_match", CHAR_POLY_MATCH),
        ("minus_one_root", MINUS_ONE_ROOT),
        ("vieta", VIETA),
        ("eigenvector_residual", EIGENVECTOR_RESIDUAL),
    ]
}
