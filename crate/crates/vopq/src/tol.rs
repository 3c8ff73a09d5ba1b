//! Centralized numeric tolerances.
//!
//! Two scales cover every check in the crate: algebraic identities on
//! directly computed quantities (inner products, traces, normalization)
//! hold to near machine precision, while anything that passes through an
//! eigenvalue computation or an operator sum gets a looser bound.

/// Tolerance for algebraic identities: normalization, orthogonality,
/// trace preservation, closed-form equalities.
pub const ALGEBRAIC: f64 = 1e-12;

/// Tolerance for eigenvalue-based checks: positive semidefiniteness of
/// measurement operators and completeness of operator sets.
pub const EIGENVALUE: f64 = 1e-9;
