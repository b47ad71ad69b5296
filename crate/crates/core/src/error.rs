//! Error types shared across the crate.

use thiserror::Error;

/// Failures from the dense linear-algebra kernel.
#[derive(Error, Debug, Clone)]
pub enum LinalgError {
    /// The active Gram matrix lost numerical rank: the incoming pivot fell
    /// below `pivot_tol` relative to that column's own Gram diagonal.
    #[error("singular active set: column {col} has pivot {pivot:.3e} below tolerance {tol:.3e}")]
    SingularActiveSet { col: usize, pivot: f64, tol: f64 },
}

/// Failures from instance generators and transforms.
#[derive(Error, Debug, Clone)]
pub enum GenError {
    /// The worst-case generator's self-check failed: the instance's exact
    /// path does not have the expected number of segments.
    #[error("construction unverified: d = {d} path has {got} segments, expected {expected}")]
    ConstructionUnverified {
        d: usize,
        got: usize,
        expected: usize,
    },
    #[error("cannot normalize a zero target vector")]
    ZeroTarget,
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error(transparent)]
    Solve(#[from] Box<SolveFailure>),
}

/// Scalar-free description of a path-solver failure. The partial path of a
/// budget overrun is reported by the solver separately (see `homotopy`).
#[derive(Error, Debug, Clone)]
pub enum SolveFailure {
    #[error(transparent)]
    Singular(#[from] LinalgError),
    #[error("segment budget {budget} exceeded at lambda {lambda:.6e}")]
    SegmentBudgetExceeded { budget: usize, lambda: f64 },
    #[error("degenerate tie at lambda {lambda:.6e} over coordinates {coords:?}")]
    DegenerateTie { lambda: f64, coords: Vec<usize> },
    #[error(
        "KKT violation {violation:.3e} exceeds tolerance {tol:.3e} at segment midpoint {lambda:.6e}"
    )]
    KktViolation {
        lambda: f64,
        violation: f64,
        tol: f64,
    },
}

/// Failures from path evaluation.
#[derive(Error, Debug, Clone)]
pub enum EvalError {
    #[error("lambda {lambda:.6e} is below the truncated path minimum {lambda_min:.6e}")]
    OutOfRange { lambda: f64, lambda_min: f64 },
    #[error("lambda must be positive, got {0:.6e}")]
    NonPositiveLambda(f64),
}

/// Failures from the brute-force oracle.
#[derive(Error, Debug, Clone)]
pub enum OracleError {
    /// Sign-pattern intervals fail to tile `(0, lambda_max]`.
    #[error("tiling violation near lambda {lambda:.6e}: {kind} of size {size:.3e}")]
    TilingViolation {
        lambda: f64,
        kind: String,
        size: f64,
    },
    #[error("fixed-lambda solver did not reach tolerance {tol:.3e} in {max_iter} iterations (last violation {violation:.3e})")]
    NoConvergence {
        tol: f64,
        max_iter: usize,
        violation: f64,
    },
    #[error(transparent)]
    Singular(#[from] LinalgError),
    #[error("dimension {0} exceeds the 3^d enumeration budget (d <= 14)")]
    DimensionTooLarge(usize),
}

/// Failures from bound evaluation.
#[derive(Error, Debug, Clone)]
pub enum BoundError {
    #[error("domain error: {0}")]
    DomainError(String),
    #[error(transparent)]
    Solve(#[from] Box<SolveFailure>),
}
