use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not Hermitian (defect {defect:.3e} exceeds {allowed:.3e})")]
    NotHermitian { defect: f64, allowed: f64 },

    #[error("matrix is indefinite: eigenvalue {eigenvalue:.3e} below the clamping threshold {threshold:.3e}")]
    Indefinite { eigenvalue: f64, threshold: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off:.3e})")]
    NoConvergence { sweeps: usize, off: f64 },

    #[error("eigenvalue dominance fails at index {index}: {lhs:.6e} > {rhs:.6e}")]
    DominanceViolated { index: usize, lhs: f64, rhs: f64 },

    #[error("majorization fails at partial sum {index}: {lhs:.6e} > {rhs:.6e}")]
    MajorizationViolated { index: usize, lhs: f64, rhs: f64 },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("partition is neither row nor column compatible; use the four-block route or the witness search")]
    Incompatible,

    #[error("four-block classification failed: {0}")]
    Classification(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("function domain violated: {0}")]
    Domain(String),

    #[error("SEARCH-FAILURE after {iterations} iterations and {restarts} restarts (best margin {best_margin:.3e}); a witness is guaranteed to exist, so this is a search shortfall, not a counterexample")]
    SearchFailure {
        iterations: usize,
        restarts: usize,
        best_margin: f64,
    },

    #[error("internal postcondition failure in {what}: residual {residual:.3e} exceeds {allowed:.3e}")]
    Postcondition {
        what: &'static str,
        residual: f64,
        allowed: f64,
    },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("invalid function spec `{spec}`: {reason}")]
    FunctionSpec { spec: String, reason: String },

    #[error("invalid argument: {0}")]
    Argument(String),
}
