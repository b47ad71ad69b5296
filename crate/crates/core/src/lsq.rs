//! Least-squares residual distance via Householder QR with column pivoting.

use crate::mat::{norm2, DenseMatrix};
use crate::scalar::Scalar;

/// Distance from `y` to the column space of `x_sub`:
/// `min_v || x_sub v - y ||_2`.
///
/// An empty column set returns `||y||_2`. Column pivoting makes the result
/// correct for rank-deficient inputs as well: only the numerically
/// independent directions are deflated from `y`.
pub fn least_squares_residual<S: Scalar>(x_sub: &DenseMatrix<S>, y: &[S]) -> S {
    let n = x_sub.rows();
    let k = x_sub.cols();
    assert_eq!(y.len(), n);
    if k == 0 {
        return norm2(y);
    }

    // Working copies; columns get rotated in place.
    let mut a: Vec<Vec<S>> = (0..k).map(|j| x_sub.col(j).to_vec()).collect();
    let mut rhs = y.to_vec();
    let mut col_order: Vec<usize> = (0..k).collect();

    let steps = k.min(n);
    for step in 0..steps {
        // Pivot: remaining column with the largest trailing norm.
        let mut best = step;
        let mut best_norm = S::zero();
        for (c, col) in a.iter().enumerate().skip(step) {
            let nrm = norm2(&col[step..]);
            if nrm > best_norm {
                best_norm = nrm;
                best = c;
            }
        }
        // Negligible remaining mass: numerically rank `step`.
        if best_norm <= S::from_f64(32.0 * S::epsilon()) * col_scale(&a, step) {
            break;
        }
        a.swap(step, best);
        col_order.swap(step, best);

        // Householder vector for a[step][step..].
        let (v, beta) = householder(&a[step][step..]);
        apply_householder(&mut a[step][step..], &v, beta);
        for col in a.iter_mut().skip(step + 1) {
            apply_householder(&mut col[step..], &v, beta);
        }
        apply_householder(&mut rhs[step..], &v, beta);
        // Entries below the diagonal of the pivot column are now zero by
        // construction; nothing reads them again.
    }

    // Residual = norm of the part of y outside the (numerical) range.
    let rank = effective_rank(&a, steps);
    norm2(&rhs[rank..])
}

/// Largest original column norm, used to scale the rank cutoff.
fn col_scale<S: Scalar>(a: &[Vec<S>], upto: usize) -> S {
    let mut m = S::zero();
    for col in a.iter().take(upto.max(1)) {
        m = m.max(norm2(col));
    }
    if m == S::zero() {
        S::one()
    } else {
        m
    }
}

fn effective_rank<S: Scalar>(a: &[Vec<S>], steps: usize) -> usize {
    let scale = col_scale(a, a.len());
    let tol = S::from_f64(32.0 * S::epsilon()) * scale;
    let mut rank = 0;
    for (j, col) in a.iter().enumerate().take(steps) {
        if col[j].abs() > tol {
            rank = j + 1;
        } else {
            break;
        }
    }
    rank
}

/// Householder reflector for `x`: returns `(v, beta)` with `v[0] = 1` such
/// that `(I - beta v v^T) x = (-sign(x0)||x||, 0, ..., 0)`.
fn householder<S: Scalar>(x: &[S]) -> (Vec<S>, S) {
    let alpha = norm2(x);
    if alpha == S::zero() {
        return (vec![S::zero(); x.len()], S::zero());
    }
    let mut v = x.to_vec();
    let a0 = if x[0] >= S::zero() { alpha } else { -alpha };
    v[0] += a0;
    let vnorm2 = crate::mat::dot(&v, &v);
    if vnorm2 == S::zero() {
        return (v, S::zero());
    }
    let beta = (S::one() + S::one()) / vnorm2;
    (v, beta)
}

fn apply_householder<S: Scalar>(x: &mut [S], v: &[S], beta: S) {
    if beta == S::zero() {
        return;
    }
    let mut s = S::zero();
    for (xi, vi) in x.iter().zip(v) {
        s += *xi * *vi;
    }
    s *= beta;
    for (xi, vi) in x.iter_mut().zip(v) {
        *xi -= s * *vi;
    }
}
