//! Path data structures: segments with affine laws, and whole-path queries.

use crate::error::EvalError;
use crate::mat::DenseMatrix;
use crate::scalar::{PrecisionMode, Scalar};

/// One maximal interval of constant sign vector.
///
/// On `[lambda_lo, lambda_hi]` the solution restricted to the active set is
/// `w_A(lambda) = a + lambda * b`; all other coordinates are zero. The first
/// segment of a path is always the zero solution on `[lambda_max, inf)`.
#[derive(Clone, Debug)]
pub struct PathSegment<S> {
    pub lambda_hi: S,
    pub lambda_lo: S,
    /// Generalized sign per coordinate, length `d`.
    pub signs: Vec<i8>,
    /// Indices with nonzero sign, ascending; `a`, `b` are indexed by this.
    pub active: Vec<usize>,
    pub a: Vec<S>,
    pub b: Vec<S>,
}

impl<S: Scalar> PathSegment<S> {
    /// Evaluates the affine law into a full-length vector.
    pub fn eval(&self, lambda: S) -> Vec<S> {
        let mut w = vec![S::zero(); self.signs.len()];
        for (k, &j) in self.active.iter().enumerate() {
            w[j] = self.a[k] + lambda * self.b[k];
        }
        w
    }

    /// Midpoint used for verification; the unbounded first segment is probed
    /// at twice its lower end.
    pub fn probe_lambda(&self) -> S {
        if self.lambda_hi.is_finite() {
            (self.lambda_hi + self.lambda_lo) / S::from_f64(2.0)
        } else {
            self.lambda_lo * S::from_f64(2.0)
        }
    }
}

/// Solver diagnostics carried by a finished path.
#[derive(Clone, Debug)]
pub struct PathDiagnostics {
    pub precision: PrecisionMode,
    /// Largest optimality violation seen at any segment midpoint.
    pub max_kkt_violation: f64,
    /// Number of events where several candidates fired within the tie window.
    pub tie_events: usize,
}

/// The full regularization path: segments in decreasing lambda order.
#[derive(Clone, Debug)]
pub struct RegularizationPath<S> {
    pub segments: Vec<PathSegment<S>>,
    pub lambda_max: S,
    /// Truncation floor; 0 for a complete path.
    pub lambda_min: f64,
    pub diagnostics: PathDiagnostics,
}

impl<S: Scalar> RegularizationPath<S> {
    /// Number of linear segments, including the zero segment.
    pub fn count(&self) -> usize {
        self.segments.len()
    }

    /// Breakpoints in strictly decreasing order (one fewer than segments).
    pub fn breakpoints(&self) -> Vec<S> {
        self.segments
            .iter()
            .take(self.segments.len().saturating_sub(1))
            .map(|s| s.lambda_lo)
            .collect()
    }

    /// Sign vectors in path order.
    pub fn sign_sequence(&self) -> Vec<Vec<i8>> {
        self.segments.iter().map(|s| s.signs.clone()).collect()
    }

    /// Solution at `lambda` (binary search over segments).
    pub fn eval(&self, lambda: S) -> Result<Vec<S>, EvalError> {
        let lf = lambda.to_f64();
        // A NaN lambda must also be rejected, hence the negative spelling.
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        let nonpositive = !(lf > 0.0);
        if nonpositive {
            return Err(EvalError::NonPositiveLambda(lf));
        }
        if lambda >= self.lambda_max {
            return Ok(vec![S::zero(); self.segments[0].signs.len()]);
        }
        if lf < self.lambda_min {
            return Err(EvalError::OutOfRange {
                lambda: lf,
                lambda_min: self.lambda_min,
            });
        }
        // Segments are sorted by decreasing lambda; find the one whose
        // interval contains `lambda`.
        let mut lo = 0usize;
        let mut hi = self.segments.len() - 1;
        while lo < hi {
            let mid = (lo + hi) / 2;
            if lambda > self.segments[mid].lambda_lo {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        Ok(self.segments[lo].eval(lambda))
    }
}

/// Per-segment solution slopes and the measured Lipschitz constants.
#[derive(Clone, Debug)]
pub struct PathSlopes {
    /// Largest per-coordinate slope magnitude of `w` over all segments.
    pub l_w: f64,
    /// Largest per-coordinate slope magnitude of `u = X^T (X w - y)`.
    pub l_u: f64,
    /// `max_i |dw_i/dlambda|` per segment, path order.
    pub per_segment_w: Vec<f64>,
}

/// Computes `dw/dlambda` per segment and the coordinate-wise Lipschitz
/// constants of `w` and `u`. Slopes are constant inside segments; breakpoints
/// carry no slope of their own.
pub fn path_slopes<S: Scalar>(x: &DenseMatrix<S>, path: &RegularizationPath<S>) -> PathSlopes {
    let mut l_w = 0.0f64;
    let mut l_u = 0.0f64;
    let mut per_segment_w = Vec::with_capacity(path.segments.len());
    for seg in &path.segments {
        let mut seg_w = 0.0f64;
        for &bi in &seg.b {
            seg_w = seg_w.max(bi.abs().to_f64());
        }
        per_segment_w.push(seg_w);
        l_w = l_w.max(seg_w);
        if !seg.active.is_empty() {
            // du/dlambda = X^T X_A b.
            let xb = x.matvec_subset(&seg.active, &seg.b);
            let du = x.tr_matvec(&xb);
            for v in du {
                l_u = l_u.max(v.abs().to_f64());
            }
        }
    }
    PathSlopes {
        l_w,
        l_u,
        per_segment_w,
    }
}
