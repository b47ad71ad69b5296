//! Extremal singular values via one-sided Jacobi.
//!
//! One-sided Jacobi orthogonalizes the columns of `X` directly (never forming
//! the Gram matrix), which preserves high relative accuracy even when column
//! norms differ by many orders of magnitude — exactly the regime of the
//! worst-case instances.

use crate::mat::{dot, norm2, DenseMatrix};
use crate::scalar::Scalar;

const MAX_SWEEPS: usize = 64;

/// Smallest and largest right singular values of `x` (`n >= d`).
///
/// `alpha` may be 0 for rank-deficient input; callers decide what to do.
pub fn extremal_singular_values<S: Scalar>(x: &DenseMatrix<S>) -> (f64, f64) {
    let sv = singular_values(x);
    let alpha = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    let beta = sv.iter().cloned().fold(0.0f64, f64::max);
    (if alpha.is_finite() { alpha } else { 0.0 }, beta)
}

/// All singular values of `x`, unordered.
pub fn singular_values<S: Scalar>(x: &DenseMatrix<S>) -> Vec<f64> {
    let n = x.rows();
    let d = x.cols();
    assert!(n >= d, "need n >= d (got {n} x {d})");
    if d == 0 {
        return Vec::new();
    }
    let mut cols: Vec<Vec<S>> = (0..d).map(|j| x.col(j).to_vec()).collect();
    let conv = S::from_f64(8.0 * S::epsilon());

    for _sweep in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..d {
            for q in p + 1..d {
                let app = dot(&cols[p], &cols[p]);
                let aqq = dot(&cols[q], &cols[q]);
                let apq = {
                    let (cp, cq) = pair(&cols, p, q);
                    dot(cp, cq)
                };
                if app == S::zero() || aqq == S::zero() {
                    continue;
                }
                if apq.abs() <= conv * (app * aqq).sqrt() {
                    continue;
                }
                rotated = true;
                // Jacobi rotation zeroing the (p,q) cross-product.
                let tau = (aqq - app) / (apq + apq);
                let t = {
                    let sgn = if tau >= S::zero() {
                        S::one()
                    } else {
                        -S::one()
                    };
                    sgn / (tau.abs() + (S::one() + tau * tau).sqrt())
                };
                let c = S::one() / (S::one() + t * t).sqrt();
                let s = c * t;
                let (cp, cq) = pair_mut(&mut cols, p, q);
                for (a, b) in cp.iter_mut().zip(cq.iter_mut()) {
                    let u = *a;
                    let v = *b;
                    *a = c * u - s * v;
                    *b = s * u + c * v;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    cols.iter().map(|c| norm2(c).to_f64()).collect()
}

fn pair<T>(v: &[Vec<T>], p: usize, q: usize) -> (&[T], &[T]) {
    debug_assert!(p < q);
    (&v[p], &v[q])
}

fn pair_mut<T>(v: &mut [Vec<T>], p: usize, q: usize) -> (&mut [T], &mut [T]) {
    debug_assert!(p < q);
    let (left, right) = v.split_at_mut(q);
    (&mut left[p], &mut right[0])
}
