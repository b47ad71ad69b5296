//! Exact Lasso regularization paths and their complexity.
//!
//! The crate enumerates every linear segment of the Lasso path
//! `w(lambda) = argmin 0.5 ||X w - y||^2 + lambda ||w||_1` by event-driven
//! homotopy, verifies segments against the optimality conditions, and cross
//! checks small instances against a brute-force sign-pattern oracle. Instance
//! generators produce the worst-case design whose path has `(3^d + 1) / 2`
//! segments, Gaussian random designs, and entry-wise Gaussian smoothing; the
//! bound module evaluates the complexity formulas these experiments are
//! compared against.
//!
//! All numerical kernels are generic over [`scalar::Scalar`], with `f64`
//! (standard) and double-double (extended) implementations.

pub mod bounds;
pub mod dd;
pub mod error;
pub mod factor;
pub mod gen;
pub mod homotopy;
pub mod instance;
pub mod kkt;
pub mod lsq;
pub mod mat;
pub mod oracle;
pub mod path;
pub mod records;
pub mod rng;
pub mod scalar;
pub mod svd;

pub use dd::Dd;
pub use error::{BoundError, EvalError, GenError, LinalgError, OracleError, SolveFailure};
pub use factor::{solve_spd, ActiveSetFactor};
pub use instance::{InstanceMeta, ProblemInstance};
pub use lsq::least_squares_residual;
pub use mat::DenseMatrix;
pub use scalar::{PrecisionMode, Scalar};
pub use svd::extremal_singular_values;
