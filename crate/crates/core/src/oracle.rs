//! Brute-force verification of the path on small instances.
//!
//! Because every linear segment carries a unique sign vector, the whole path
//! can be recovered without any path following: enumerate all `3^d` sign
//! patterns, solve the stationarity equations on each support, and keep the
//! lambda interval (if any) on which the pattern is self-consistent. The
//! intervals must tile `(0, lambda_max]`.
//!
//! `grid_solve` is a second independent route: plain cyclic coordinate
//! minimization at a fixed lambda.

use crate::error::OracleError;
use crate::factor::ActiveSetFactor;
use crate::instance::ProblemInstance;
use crate::kkt::kkt_check_raw;
use crate::mat::{dot, inf_norm, promote, DenseMatrix};
use crate::path::{PathDiagnostics, PathSegment, RegularizationPath};
use crate::scalar::Scalar;

/// Dimension cap: the enumeration is 3^d.
pub const ENUMERATION_MAX_D: usize = 14;

/// Relative gap tolerance for the tiling check, times `lambda_max`.
pub const GAP_TOL: f64 = 1e-9;

/// Recovers the entire path by exhaustive sign-pattern enumeration.
pub fn enumerate_sign_patterns<S: Scalar>(
    inst: &ProblemInstance,
) -> Result<RegularizationPath<S>, OracleError> {
    let d = inst.d();
    if d > ENUMERATION_MAX_D {
        return Err(OracleError::DimensionTooLarge(d));
    }
    let x = inst.x.map_scalar::<S>();
    let y = promote::<S>(&inst.y);
    let lam_max = inf_norm(&x.tr_matvec(&y));

    let mut segments: Vec<PathSegment<S>> = Vec::new();
    let total = 3usize.pow(d as u32);
    let mut signs = vec![0i8; d];
    for code in 0..total {
        decode_pattern(code, &mut signs);
        if let Some(seg) = pattern_interval(&x, &y, &signs)? {
            segments.push(seg);
        }
    }

    // Sort by decreasing lambda and verify the intervals tile (0, lam_max].
    segments.sort_by(|a, b| b.lambda_hi.partial_cmp(&a.lambda_hi).unwrap());
    let gap_tol = S::from_f64(GAP_TOL) * lam_max;
    if segments.is_empty() || segments[0].lambda_hi.is_finite() {
        return Err(OracleError::TilingViolation {
            lambda: lam_max.to_f64(),
            kind: "missing zero segment".into(),
            size: f64::NAN,
        });
    }
    for k in 0..segments.len() - 1 {
        let gap = segments[k].lambda_lo - segments[k + 1].lambda_hi;
        if gap.abs() > gap_tol {
            return Err(OracleError::TilingViolation {
                lambda: segments[k].lambda_lo.to_f64(),
                kind: if gap > S::zero() { "gap" } else { "overlap" }.into(),
                size: gap.abs().to_f64(),
            });
        }
        // Snap shared endpoints so downstream consumers see exact tiling.
        let shared = segments[k].lambda_lo;
        segments[k + 1].lambda_hi = shared;
    }
    let tail = segments.last().unwrap().lambda_lo;
    if tail.abs() > gap_tol {
        return Err(OracleError::TilingViolation {
            lambda: tail.to_f64(),
            kind: "gap above zero".into(),
            size: tail.to_f64(),
        });
    }
    if let Some(last) = segments.last_mut() {
        last.lambda_lo = S::zero();
    }

    Ok(RegularizationPath {
        segments,
        lambda_max: lam_max,
        lambda_min: 0.0,
        diagnostics: PathDiagnostics {
            precision: S::MODE,
            max_kkt_violation: 0.0,
            tie_events: 0,
        },
    })
}

fn decode_pattern(mut code: usize, signs: &mut [i8]) {
    for s in signs.iter_mut() {
        *s = (code % 3) as i8 - 1;
        code /= 3;
    }
}

/// Lambda interval on which `signs` is the optimal pattern, if nonempty.
fn pattern_interval<S: Scalar>(
    x: &DenseMatrix<S>,
    y: &[S],
    signs: &[i8],
) -> Result<Option<PathSegment<S>>, OracleError> {
    let active: Vec<usize> = (0..signs.len()).filter(|&j| signs[j] != 0).collect();
    if active.len() > x.rows() {
        return Ok(None); // cannot be full rank on this support
    }
    let (a, b) = if active.is_empty() {
        (Vec::new(), Vec::new())
    } else {
        let factor = match ActiveSetFactor::from_active(x, &active) {
            Ok(f) => f,
            // A rank-deficient support cannot host a valid pattern.
            Err(_) => return Ok(None),
        };
        let xaty: Vec<S> = active.iter().map(|&j| dot(x.col(j), y)).collect();
        let s_a: Vec<S> = active
            .iter()
            .map(|&j| S::from_f64(signs[j] as f64))
            .collect();
        let a = factor.solve(&xaty);
        let mut b = factor.solve(&s_a);
        for v in b.iter_mut() {
            *v = -*v;
        }
        (a, b)
    };

    // Interval bounds from sign consistency and inactive feasibility, all
    // affine in lambda.
    let mut lo = S::zero();
    let mut hi = S::infinity();

    // Active: sign_i * (a_i + lambda b_i) > 0.
    for (k, &j) in active.iter().enumerate() {
        let s = S::from_f64(signs[j] as f64);
        constrain_affine(s * a[k], s * b[k], &mut lo, &mut hi);
        if hi <= lo {
            return Ok(None);
        }
    }
    // Inactive: |p_j + lambda q_j| <= lambda.
    let mut r_a = x.matvec_subset(&active, &a);
    for (ri, &yi) in r_a.iter_mut().zip(y) {
        *ri -= yi;
    }
    let r_b = x.matvec_subset(&active, &b);
    for (j, &sj) in signs.iter().enumerate() {
        if sj != 0 {
            continue;
        }
        let p = dot(x.col(j), &r_a);
        let q = dot(x.col(j), &r_b);
        // p + lambda (q - 1) <= 0  and  p + lambda (q + 1) >= 0.
        constrain_affine(-p, S::one() - q, &mut lo, &mut hi);
        constrain_affine(p, q + S::one(), &mut lo, &mut hi);
        if hi <= lo {
            return Ok(None);
        }
    }
    // NaN endpoints must also land here, so spell the test negatively.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    let degenerate = !(hi > lo);
    if degenerate {
        return Ok(None);
    }
    Ok(Some(PathSegment {
        lambda_hi: hi,
        lambda_lo: lo,
        signs: signs.to_vec(),
        active,
        a,
        b,
    }))
}

/// Intersects `{lambda : c0 + lambda * c1 > 0}` into `[lo, hi]`.
fn constrain_affine<S: Scalar>(c0: S, c1: S, lo: &mut S, hi: &mut S) {
    if c1 == S::zero() {
        if c0 <= S::zero() {
            *hi = *lo; // empty
        }
        return;
    }
    let root = -c0 / c1;
    if c1 > S::zero() {
        *lo = (*lo).max(root);
    } else {
        *hi = (*hi).min(root);
    }
}

/// Fixed-lambda minimizer by cyclic coordinate descent with exact
/// soft-threshold updates. Independent of the homotopy machinery.
pub fn grid_solve(
    inst: &ProblemInstance,
    lambda: f64,
    tol: f64,
    max_iter: usize,
) -> Result<Vec<f64>, OracleError> {
    assert!(lambda > 0.0, "lambda must be positive");
    let x = &inst.x;
    let y = &inst.y;
    let d = x.cols();
    let gram_diag: Vec<f64> = (0..d).map(|j| dot(x.col(j), x.col(j))).collect();
    let mut w = vec![0.0f64; d];
    let mut resid = y.clone(); // r = y - X w
    let mut last_violation = f64::INFINITY;
    for _sweep in 0..max_iter {
        for j in 0..d {
            if gram_diag[j] == 0.0 {
                continue; // orthogonal-to-everything column never activates
            }
            let zj = dot(x.col(j), &resid) + gram_diag[j] * w[j];
            let new = soft_threshold(zj, lambda) / gram_diag[j];
            let delta = new - w[j];
            if delta != 0.0 {
                for (ri, &xij) in resid.iter_mut().zip(x.col(j)) {
                    *ri -= xij * delta;
                }
                w[j] = new;
            }
        }
        let rep = kkt_check_raw(x, y, lambda, &w, tol);
        last_violation = rep.max_violation;
        if rep.pass() {
            return Ok(w);
        }
    }
    Err(OracleError::NoConvergence {
        tol,
        max_iter,
        violation: last_violation,
    })
}

fn soft_threshold(z: f64, lambda: f64) -> f64 {
    if z > lambda {
        z - lambda
    } else if z < -lambda {
        z + lambda
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::InstanceMeta;

    fn identity_instance(y: Vec<f64>) -> ProblemInstance {
        ProblemInstance::new(DenseMatrix::identity(y.len()), y, InstanceMeta::default()).unwrap()
    }

    #[test]
    fn one_dimensional_two_intervals() {
        // d = 1, X = (1), y = (1): [1, inf) sign 0 and (0, 1) sign +1.
        let inst = ProblemInstance::new(
            DenseMatrix::from_col_major(1, 1, vec![1.0]),
            vec![1.0],
            InstanceMeta::default(),
        )
        .unwrap();
        let path = enumerate_sign_patterns::<f64>(&inst).unwrap();
        assert_eq!(path.count(), 2);
        assert_eq!(path.segments[0].signs, vec![0]);
        assert_eq!(path.segments[1].signs, vec![1]);
        assert!((path.segments[0].lambda_lo - 1.0).abs() < 1e-15);
    }

    #[test]
    fn orthonormal_design_tiling() {
        let inst = identity_instance(vec![0.9, 0.5, 0.1]);
        let path = enumerate_sign_patterns::<f64>(&inst).unwrap();
        assert_eq!(path.count(), 4);
        let bp = path.breakpoints();
        assert!((bp[0] - 0.9).abs() < 1e-12);
        assert!((bp[1] - 0.5).abs() < 1e-12);
        assert!((bp[2] - 0.1).abs() < 1e-12);
    }

    #[test]
    fn grid_solve_soft_thresholding_exact() {
        let inst = identity_instance(vec![0.9, 0.5, 0.1]);
        let w = grid_solve(&inst, 0.25, 1e-12, 100).unwrap();
        assert!((w[0] - 0.65).abs() < 1e-12);
        assert!((w[1] - 0.25).abs() < 1e-12);
        assert_eq!(w[2], 0.0);
    }

    #[test]
    fn grid_solve_above_lambda_max_is_zero() {
        let inst = identity_instance(vec![0.9, 0.5, 0.1]);
        let w = grid_solve(&inst, 1.5, 1e-12, 10).unwrap();
        assert_eq!(w, vec![0.0; 3]);
    }

    #[test]
    fn enumeration_cap() {
        let inst = identity_instance(vec![0.5; 15]);
        assert!(matches!(
            enumerate_sign_patterns::<f64>(&inst),
            Err(OracleError::DimensionTooLarge(15))
        ));
    }

    #[test]
    fn duplicated_columns_violate_tiling() {
        // Two identical columns: the solution is not unique, patterns
        // overlap, and the tiling check reports it.
        let x = DenseMatrix::from_col_major(3, 2, vec![1.0, 0.5, 0.25, 1.0, 0.5, 0.25]);
        let inst = ProblemInstance::new(x, vec![1.0, 0.2, 0.1], InstanceMeta::default()).unwrap();
        match enumerate_sign_patterns::<f64>(&inst) {
            Err(OracleError::TilingViolation { .. }) => {}
            other => panic!(
                "expected TilingViolation, got {:?}",
                other.map(|p| p.count())
            ),
        }
    }

    #[test]
    fn grid_solve_reports_no_convergence() {
        let inst = identity_instance(vec![0.9, 0.5, 0.1]);
        match grid_solve(&inst, 0.25, 1e-12, 0) {
            Err(OracleError::NoConvergence { max_iter: 0, .. }) => {}
            other => panic!("expected NoConvergence, got {other:?}"),
        }
    }
}
