//! Cholesky factorization of an active-set Gram matrix with add-column /
//! remove-column updates.
//!
//! The factor tracks `G_A = X_A^T X_A` for an ordered active set `A`. Adding
//! a column appends one Cholesky column; removing one deletes it and restores
//! triangularity with Givens rotations (the classical update/downdate pair).
//! After [`REFACTOR_INTERVAL`] updates the factor is rebuilt from scratch to
//! bound drift on very long event sequences.
//!
//! The rank test is scale-invariant: an incoming pivot is compared against
//! its own column's Gram diagonal, so columns of wildly different norms (the
//! worst-case instances span forty decades) are each judged at their own
//! scale.

use crate::error::LinalgError;
use crate::mat::{dot, DenseMatrix};
use crate::scalar::Scalar;

/// Full refactorization cadence, counted in add/remove operations.
pub const REFACTOR_INTERVAL: usize = 50;

/// Relative pivot tolerance multiplier: `pivot > PIVOT_TOL_MULT * eps * G_jj`.
pub const PIVOT_TOL_MULT: f64 = 1e6;

/// Cholesky factor of the *equilibrated* active Gram matrix
/// `H = D^{-1} G_A D^{-1}` with `D = diag(||x_j||)`, stored by columns,
/// together with the raw Gram for iterative refinement.
///
/// Equilibration keeps the factored matrix's condition number governed by
/// column correlations rather than column scales, which is what makes the
/// worst-case instances (column norms spanning dozens of decades) solvable.
#[derive(Clone, Debug)]
pub struct ActiveSetFactor<S> {
    active: Vec<usize>,
    /// `r_cols[j]` holds column `j` of the Cholesky factor of `H`,
    /// entries `0..=j`.
    r_cols: Vec<Vec<S>>,
    /// `gram[j]` holds column `j` of the raw `G_A` (full length).
    gram: Vec<Vec<S>>,
    /// Column norms `||x_j||` for the active columns.
    scales: Vec<S>,
    updates: usize,
}

impl<S: Scalar> ActiveSetFactor<S> {
    pub fn new() -> Self {
        ActiveSetFactor {
            active: Vec::new(),
            r_cols: Vec::new(),
            gram: Vec::new(),
            scales: Vec::new(),
            updates: 0,
        }
    }

    /// Builds a factor over the given active set in order.
    pub fn from_active(x: &DenseMatrix<S>, active: &[usize]) -> Result<Self, LinalgError> {
        let mut f = Self::new();
        for &j in active {
            f.push_column(x, j)?;
        }
        f.updates = 0;
        Ok(f)
    }

    pub fn active(&self) -> &[usize] {
        &self.active
    }

    pub fn len(&self) -> usize {
        self.active.len()
    }

    pub fn is_empty(&self) -> bool {
        self.active.is_empty()
    }

    /// Raw Cholesky append without touching the update counter.
    fn push_column(&mut self, x: &DenseMatrix<S>, j: usize) -> Result<(), LinalgError> {
        let k = self.active.len();
        let xj = x.col(j);
        // New raw Gram column: v_i = <x_{A_i}, x_j>, d = <x_j, x_j>.
        let mut gcol: Vec<S> = self.active.iter().map(|&a| dot(x.col(a), xj)).collect();
        let d = dot(xj, xj);
        let scale = d.sqrt();
        let tol = S::from_f64(PIVOT_TOL_MULT * S::epsilon());
        #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must fail the test
        let scale_bad = !(scale > S::zero()) || !scale.is_finite();
        if scale_bad {
            return Err(LinalgError::SingularActiveSet {
                col: j,
                pivot: d.to_f64(),
                tol: tol.to_f64(),
            });
        }

        // Equilibrated column h_i = v_i / (scale_i * scale); h_jj = 1.
        let h: Vec<S> = gcol
            .iter()
            .zip(&self.scales)
            .map(|(&v, &si)| v / (si * scale))
            .collect();
        // w solves R^T w = h.
        let mut w = vec![S::zero(); k];
        for i in 0..k {
            let mut s = h[i];
            for (t, wt) in w.iter().enumerate().take(i) {
                s -= self.r_cols[i][t] * *wt;
            }
            w[i] = s / self.r_cols[i][i];
        }
        // Unit diagonal makes the rank test scale-invariant: the pivot is
        // the squared sine of the angle between x_j and span(X_A).
        let pivot = S::one() - dot(&w, &w);
        #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must fail the test
        let pivot_bad = !(pivot > tol) || !pivot.is_finite();
        if pivot_bad {
            return Err(LinalgError::SingularActiveSet {
                col: j,
                pivot: pivot.to_f64(),
                tol: tol.to_f64(),
            });
        }
        w.push(pivot.sqrt());
        self.r_cols.push(w);
        gcol.push(d);
        for (i, g) in self.gram.iter_mut().enumerate() {
            g.push(gcol[i]);
        }
        self.gram.push(gcol);
        self.scales.push(scale);
        self.active.push(j);
        Ok(())
    }

    /// Adds column `j` of `x` to the active set.
    pub fn add_column(&mut self, x: &DenseMatrix<S>, j: usize) -> Result<(), LinalgError> {
        self.push_column(x, j)?;
        self.bump(x)
    }

    /// Removes the active column at position `pos` (index into `active`).
    pub fn remove_column(&mut self, x: &DenseMatrix<S>, pos: usize) -> Result<(), LinalgError> {
        assert!(pos < self.active.len());
        self.active.remove(pos);
        self.r_cols.remove(pos);
        self.scales.remove(pos);
        for g in self.gram.iter_mut() {
            g.remove(pos);
        }
        self.gram.remove(pos);

        // Columns right of `pos` are one entry too long: R is upper
        // Hessenberg there. Givens rotations on row pairs restore it.
        for j in pos..self.r_cols.len() {
            // Rotate rows (j, j+1) to zero entry (j+1) of column j.
            let a = self.r_cols[j][j];
            let b = self.r_cols[j][j + 1];
            let (c, s) = givens(a, b);
            for col in self.r_cols[j..].iter_mut() {
                let u = col[j];
                let v = col[j + 1];
                col[j] = c * u + s * v;
                col[j + 1] = c * v - s * u;
            }
            self.r_cols[j].truncate(j + 1);
        }
        self.bump(x)
    }

    fn bump(&mut self, x: &DenseMatrix<S>) -> Result<(), LinalgError> {
        self.updates += 1;
        if self.updates >= REFACTOR_INTERVAL {
            let active = std::mem::take(&mut self.active);
            self.r_cols.clear();
            self.gram.clear();
            self.scales.clear();
            self.updates = 0;
            for &j in &active {
                self.push_column(x, j)?;
            }
        }
        Ok(())
    }

    fn solve_raw(&self, rhs: &[S]) -> Vec<S> {
        let k = self.active.len();
        debug_assert_eq!(rhs.len(), k);
        // G z = rhs  <=>  H (D z) = D^{-1} rhs with H = R^T R.
        // Forward: R^T z = D^{-1} rhs (column access suits forward).
        let mut z: Vec<S> = rhs.iter().zip(&self.scales).map(|(&r, &s)| r / s).collect();
        for i in 0..k {
            let mut s = z[i];
            for (t, &zt) in z.iter().enumerate().take(i) {
                s -= self.r_cols[i][t] * zt;
            }
            z[i] = s / self.r_cols[i][i];
        }
        // Backward: R w = z, column-oriented.
        let mut w = z;
        for j in (0..k).rev() {
            w[j] /= self.r_cols[j][j];
            let wj = w[j];
            for (t, wt) in w.iter_mut().enumerate().take(j) {
                *wt -= self.r_cols[j][t] * wj;
            }
        }
        // Undo the right scaling.
        for (wi, &s) in w.iter_mut().zip(&self.scales) {
            *wi /= s;
        }
        w
    }

    /// Solves `G_A z = rhs` with one step of iterative refinement.
    pub fn solve(&self, rhs: &[S]) -> Vec<S> {
        let mut z = self.solve_raw(rhs);
        let gz = self.gram_matvec(&z);
        let resid: Vec<S> = rhs.iter().zip(&gz).map(|(&r, &g)| r - g).collect();
        let dz = self.solve_raw(&resid);
        for (zi, di) in z.iter_mut().zip(&dz) {
            *zi += *di;
        }
        z
    }

    /// `G_A v` using the stored Gram columns.
    pub fn gram_matvec(&self, v: &[S]) -> Vec<S> {
        let k = self.active.len();
        let mut out = vec![S::zero(); k];
        for (j, &vj) in v.iter().enumerate() {
            for (o, &g) in out.iter_mut().zip(&self.gram[j]) {
                *o += g * vj;
            }
        }
        out
    }
}

impl<S: Scalar> Default for ActiveSetFactor<S> {
    fn default() -> Self {
        Self::new()
    }
}

/// Givens pair `(c, s)` with `c*a + s*b = r`, `c*b - s*a = 0`.
fn givens<S: Scalar>(a: S, b: S) -> (S, S) {
    if b == S::zero() {
        return (S::one(), S::zero());
    }
    let h = (a * a + b * b).sqrt();
    (a / h, b / h)
}

/// Exposed form of the spec operation: solve `(X_A^T X_A) z = rhs`.
pub fn solve_spd<S: Scalar>(factor: &ActiveSetFactor<S>, rhs: &[S]) -> Vec<S> {
    factor.solve(rhs)
}
