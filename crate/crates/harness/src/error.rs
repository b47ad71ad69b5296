//! Harness-level errors.

use thiserror::Error;

#[derive(Error, Debug)]
pub enum HarnessError {
    #[error("bad magic 0x{got:08x}, expected 0x{expected:08x}")]
    BadMagic { got: u32, expected: u32 },
    #[error("truncated file: {0}")]
    TruncatedFile(String),
    #[error("feature matrix is rank deficient after zero-column removal")]
    RankDeficient,
    #[error("invalid arguments: {0}")]
    InvalidArguments(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Gen(#[from] lasso_lab_core::GenError),
    #[error(transparent)]
    Solve(#[from] lasso_lab_core::SolveFailure),
    #[error(transparent)]
    Bound(#[from] lasso_lab_core::BoundError),
    #[error(transparent)]
    Record(#[from] lasso_lab_core::records::RecordError),
}
