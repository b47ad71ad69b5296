//! Column-major dense matrices and small vector helpers.
//!
//! Nothing here is clever: problems in this crate are at most a few thousand
//! rows and a hundred or so columns, and the extended-precision scalar rules
//! out BLAS anyway. Plain loops keep both modes on the same code path.

use crate::scalar::Scalar;

/// Dense `rows x cols` matrix stored column-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> DenseMatrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    /// Builds from a function of (row, col).
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut m = Self::zeros(rows, cols);
        for j in 0..cols {
            for i in 0..rows {
                m.data[j * rows + i] = f(i, j);
            }
        }
        m
    }

    /// Column-major construction from raw data (`data.len() == rows * cols`).
    pub fn from_col_major(rows: usize, cols: usize, data: Vec<S>) -> Self {
        assert_eq!(data.len(), rows * cols, "shape mismatch");
        DenseMatrix { rows, cols, data }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { S::one() } else { S::zero() })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> S {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[j * self.rows + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: S) {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[j * self.rows + i] = v;
    }

    /// Contiguous slice holding column `j`.
    #[inline]
    pub fn col(&self, j: usize) -> &[S] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn col_major_data(&self) -> &[S] {
        &self.data
    }

    /// `X v` for a full-width `v`.
    pub fn matvec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(v.len(), self.cols);
        let mut out = vec![S::zero(); self.rows];
        for (j, &vj) in v.iter().enumerate() {
            if vj == S::zero() {
                continue;
            }
            for (oi, &xij) in out.iter_mut().zip(self.col(j)) {
                *oi += xij * vj;
            }
        }
        out
    }

    /// `X_A v` where `v[k]` multiplies column `active[k]`.
    pub fn matvec_subset(&self, active: &[usize], v: &[S]) -> Vec<S> {
        assert_eq!(v.len(), active.len());
        let mut out = vec![S::zero(); self.rows];
        for (&j, &vj) in active.iter().zip(v) {
            for (oi, &xij) in out.iter_mut().zip(self.col(j)) {
                *oi += xij * vj;
            }
        }
        out
    }

    /// `X^T r`.
    pub fn tr_matvec(&self, r: &[S]) -> Vec<S> {
        assert_eq!(r.len(), self.rows);
        (0..self.cols).map(|j| dot(self.col(j), r)).collect()
    }

    /// Promotes / demotes entries into another scalar type.
    pub fn map_scalar<T: Scalar>(&self) -> DenseMatrix<T> {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| T::from_f64(v.to_f64())).collect(),
        }
    }

    /// New matrix keeping only the listed columns, in the given order.
    pub fn select_columns(&self, keep: &[usize]) -> DenseMatrix<S> {
        let mut data = Vec::with_capacity(self.rows * keep.len());
        for &j in keep {
            data.extend_from_slice(self.col(j));
        }
        DenseMatrix {
            rows: self.rows,
            cols: keep.len(),
            data,
        }
    }
}

pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = S::zero();
    for (&x, &y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

pub fn norm2<S: Scalar>(v: &[S]) -> S {
    dot(v, v).sqrt()
}

pub fn inf_norm<S: Scalar>(v: &[S]) -> S {
    v.iter().fold(S::zero(), |acc, &x| acc.max(x.abs()))
}

pub fn sub<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

pub fn scale<S: Scalar>(v: &[S], c: S) -> Vec<S> {
    v.iter().map(|&x| x * c).collect()
}

pub fn promote<S: Scalar>(v: &[f64]) -> Vec<S> {
    v.iter().map(|&x| S::from_f64(x)).collect()
}

pub fn demote<S: Scalar>(v: &[S]) -> Vec<f64> {
    v.iter().map(|&x| x.to_f64()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matvec_and_transpose() {
        // X = [[1,2],[3,4],[5,6]] stored column-major.
        let x = DenseMatrix::from_col_major(3, 2, vec![1.0, 3.0, 5.0, 2.0, 4.0, 6.0]);
        assert_eq!(x.get(1, 1), 4.0);
        assert_eq!(x.matvec(&[1.0, 1.0]), vec![3.0, 7.0, 11.0]);
        assert_eq!(x.tr_matvec(&[1.0, 0.0, 1.0]), vec![6.0, 8.0]);
    }

    #[test]
    fn subset_matches_full() {
        let x = DenseMatrix::from_fn(4, 3, |i, j| (i * 3 + j) as f64);
        let full = x.matvec(&[0.0, 2.0, -1.0]);
        let sub = x.matvec_subset(&[1, 2], &[2.0, -1.0]);
        assert_eq!(full, sub);
    }
}
