//! Optimality checking for the Lasso.
//!
//! `w` is optimal at `lambda` iff `u = X^T (X w - y)` satisfies
//! `u_i = -lambda * sign(w_i)` on the support and `|u_i| <= lambda` off it.
//! The report records the violation magnitude of whichever condition applies
//! to each coordinate.

use crate::instance::ProblemInstance;
use crate::mat::{promote, DenseMatrix};
use crate::scalar::Scalar;

/// Per-coordinate optimality violations at one `(lambda, w)` pair.
#[derive(Clone, Debug)]
pub struct KktReport {
    /// `u = X^T (X w - y)`, rounded to `f64` for reporting.
    pub u: Vec<f64>,
    /// Active coordinate: `|u_i + lambda * sign(w_i)|`.
    /// Inactive coordinate: `max(0, |u_i| - lambda)`.
    pub violations: Vec<f64>,
    pub max_violation: f64,
    pub lambda: f64,
    pub tol: f64,
}

impl KktReport {
    pub fn pass(&self) -> bool {
        self.max_violation <= self.tol
    }
}

/// Optimality check against already-promoted data; used inside solvers.
pub fn kkt_check_raw<S: Scalar>(
    x: &DenseMatrix<S>,
    y: &[S],
    lambda: S,
    w: &[S],
    tol: f64,
) -> KktReport {
    let fit = x.matvec(w);
    let resid: Vec<S> = fit.iter().zip(y).map(|(&f, &t)| f - t).collect();
    let u = x.tr_matvec(&resid);
    let mut violations = Vec::with_capacity(u.len());
    let mut max_violation = S::zero();
    for (&ui, &wi) in u.iter().zip(w) {
        let v = if wi == S::zero() {
            (ui.abs() - lambda).max(S::zero())
        } else {
            let sign = if wi > S::zero() { S::one() } else { -S::one() };
            (ui + lambda * sign).abs()
        };
        max_violation = max_violation.max(v);
        violations.push(v.to_f64());
    }
    KktReport {
        u: u.iter().map(|v| v.to_f64()).collect(),
        violations,
        max_violation: max_violation.to_f64(),
        lambda: lambda.to_f64(),
        tol,
    }
}

/// Optimality check for an instance, promoting into the working scalar.
pub fn kkt_check<S: Scalar>(inst: &ProblemInstance, lambda: f64, w: &[f64], tol: f64) -> KktReport {
    let x = inst.x.map_scalar::<S>();
    let y = promote::<S>(&inst.y);
    let ws = promote::<S>(w);
    kkt_check_raw(&x, &y, S::from_f64(lambda), &ws, tol)
}
