//! Problem instances: a design matrix, a target vector, and provenance.
//!
//! Instances are stored in `f64`. Generators only emit exactly representable
//! entries, so promoting an instance into extended precision is lossless and
//! both modes solve bit-identical problems.

use serde::{Deserialize, Serialize};

use crate::error::GenError;
use crate::mat::{norm2, DenseMatrix};

/// How the smoothing variance scales with the instance.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarianceMode {
    /// Each entry perturbed with variance `sigma^2`.
    PerEntry,
    /// Each entry perturbed with variance `sigma^2 / n`.
    Scaled,
}

/// Provenance carried along with an instance.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct InstanceMeta {
    pub generator: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub trial: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sigma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub variance_mode: Option<VarianceMode>,
    /// Multiplier that was applied to `y` by [`ProblemInstance::normalize`].
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub normalization_scale: Option<f64>,
    /// Set when `||y||_2 = 1` is guaranteed by construction or normalization.
    #[serde(default)]
    pub normalized: bool,
}

/// A Lasso regression instance `(X, y)` with `X` of size `n x d`, `n >= d`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemInstance {
    pub x: DenseMatrix<f64>,
    pub y: Vec<f64>,
    pub meta: InstanceMeta,
}

impl ProblemInstance {
    pub fn new(x: DenseMatrix<f64>, y: Vec<f64>, meta: InstanceMeta) -> Result<Self, GenError> {
        if x.cols() < 1 || x.rows() < x.cols() {
            return Err(GenError::InvalidInstance(format!(
                "need n >= d >= 1, got {} x {}",
                x.rows(),
                x.cols()
            )));
        }
        if y.len() != x.rows() {
            return Err(GenError::InvalidInstance(format!(
                "y has length {}, expected {}",
                y.len(),
                x.rows()
            )));
        }
        if !y.iter().all(|v| v.is_finite()) || !x.col_major_data().iter().all(|v| v.is_finite()) {
            return Err(GenError::InvalidInstance("non-finite entry".into()));
        }
        let inst = ProblemInstance { x, y, meta };
        if inst.meta.normalized {
            let n = norm2(&inst.y);
            if (n - 1.0).abs() > 1e-12 {
                return Err(GenError::InvalidInstance(format!(
                    "meta.normalized set but ||y|| = {n}"
                )));
            }
        }
        Ok(inst)
    }

    pub fn n(&self) -> usize {
        self.x.rows()
    }

    pub fn d(&self) -> usize {
        self.x.cols()
    }

    /// Rescales `y` to unit norm, recording the scale; `X` is unchanged.
    ///
    /// Segment counts are invariant under this together with the induced
    /// rescaling of lambda, which tests check as a property rather than
    /// applying any transformation here.
    pub fn normalize(&self) -> Result<ProblemInstance, GenError> {
        let n = norm2(&self.y);
        if n == 0.0 {
            return Err(GenError::ZeroTarget);
        }
        let scale = 1.0 / n;
        let mut out = self.clone();
        if (n - 1.0).abs() <= 1e-12 {
            out.meta.normalized = true;
            out.meta.normalization_scale = Some(out.meta.normalization_scale.unwrap_or(1.0));
            return Ok(out);
        }
        for v in out.y.iter_mut() {
            *v *= scale;
        }
        out.meta.normalization_scale = Some(out.meta.normalization_scale.unwrap_or(1.0) * scale);
        out.meta.normalized = norm2(&out.y) - 1.0 <= 1e-12 && 1.0 - norm2(&out.y) <= 1e-12;
        Ok(out)
    }
}
