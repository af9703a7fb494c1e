//! Numerical tolerances shared across modules.
//!
//! Unless stated otherwise a tolerance is applied relative to
//! `1 + ||input||_F` (or its square for quadratic quantities).

/// Allowed `||H - H*||_F / ||H||_F` before a matrix is rejected as non-Hermitian.
pub const HERMITIAN: f64 = 1e-10;

/// Per-dimension bound on `||Q* Q - I||_F`.
pub const UNITARY_PER_DIM: f64 = 1e-12;

/// Reconstruction tolerance for eigen/singular decompositions.
pub const RECON: f64 = 1e-12;

/// Eigenvalues of a PSD input above `-PSD * ||H||_2` are clamped to zero.
pub const PSD: f64 = 1e-10;

/// Eigenvalues of a PSD input in `[0, RANK * ||H||_2]` are treated as zero
/// by the functional calculus, so rounding noise in a null space does not
/// survive fractional powers.
pub const RANK: f64 = 1e-13;

/// Decomposition certificate residual, relative to `1 + ||A||_F^2`.
pub const DECOMPOSITION: f64 = 1e-10;

/// Loewner margin of functional certificates, relative to `1 + ||lhs||_2`.
pub const FUNCTIONAL: f64 = 1e-8;

/// Inequality report margins, relative to `1 + ||A||_2^2`.
pub const INEQUALITY: f64 = 1e-9;

/// Unit-norm tolerance for hyperplane normals.
pub const UNIT_VECTOR: f64 = 1e-12;

/// Jacobi sweep cap.
pub const MAX_SWEEPS: usize = 64;

pub fn unitary(dim: usize) -> f64 {
    UNITARY_PER_DIM * dim.max(1) as f64
}
