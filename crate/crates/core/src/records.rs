//! On-disk record formats: JSON with base-16 scalar payloads.
//!
//! Decimal round trips lose extended-precision bits, so every scalar is
//! serialized as the hex of its `f64` limbs: `"0x3fe5555555555555"` for a
//! standard scalar, `"0x...,0x..."` (high limb first) for an extended one.
//! Records carry a schema version so readers can reject foreign files.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dd::Dd;
use crate::instance::{InstanceMeta, ProblemInstance};
use crate::mat::DenseMatrix;
use crate::path::{PathDiagnostics, PathSegment, RegularizationPath};
use crate::scalar::{PrecisionMode, Scalar};

pub const INSTANCE_SCHEMA: &str = "instance/v1";
pub const PATH_SCHEMA: &str = "path/v1";

#[derive(Error, Debug)]
pub enum RecordError {
    #[error("bad hex scalar `{0}`")]
    BadHex(String),
    #[error("unsupported schema `{got}`, expected `{expected}`")]
    BadSchema { got: String, expected: String },
    #[error("malformed record: {0}")]
    Malformed(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub fn f64_to_hex(x: f64) -> String {
    format!("0x{:016x}", x.to_bits())
}

pub fn hex_to_f64(s: &str) -> Result<f64, RecordError> {
    let body = s
        .strip_prefix("0x")
        .ok_or_else(|| RecordError::BadHex(s.into()))?;
    u64::from_str_radix(body, 16)
        .map(f64::from_bits)
        .map_err(|_| RecordError::BadHex(s.into()))
}

/// Scalars that can round-trip through the hex record encoding.
pub trait HexScalar: Scalar {
    fn to_hex(self) -> String;
    fn from_hex(s: &str) -> Result<Self, RecordError>;
}

impl HexScalar for f64 {
    fn to_hex(self) -> String {
        f64_to_hex(self)
    }
    fn from_hex(s: &str) -> Result<Self, RecordError> {
        hex_to_f64(s)
    }
}

impl HexScalar for Dd {
    fn to_hex(self) -> String {
        format!("{},{}", f64_to_hex(self.hi), f64_to_hex(self.lo))
    }
    fn from_hex(s: &str) -> Result<Self, RecordError> {
        let (hi, lo) = s
            .split_once(',')
            .ok_or_else(|| RecordError::BadHex(s.into()))?;
        Ok(Dd::new(hex_to_f64(hi)?, hex_to_f64(lo)?))
    }
}

fn vec_to_hex<S: HexScalar>(v: &[S]) -> Vec<String> {
    v.iter().map(|&x| x.to_hex()).collect()
}

fn vec_from_hex<S: HexScalar>(v: &[String]) -> Result<Vec<S>, RecordError> {
    v.iter().map(|s| S::from_hex(s)).collect()
}

/// Serializable instance: metadata plus column-major hex payload.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub schema: String,
    pub n: usize,
    pub d: usize,
    pub meta: InstanceMeta,
    /// Column-major entries of `X`, hex-encoded `f64`.
    pub x: Vec<String>,
    pub y: Vec<String>,
}

impl InstanceRecord {
    pub fn from_instance(inst: &ProblemInstance) -> Self {
        InstanceRecord {
            schema: INSTANCE_SCHEMA.into(),
            n: inst.n(),
            d: inst.d(),
            meta: inst.meta.clone(),
            x: vec_to_hex(inst.x.col_major_data()),
            y: vec_to_hex(&inst.y),
        }
    }

    pub fn into_instance(self) -> Result<ProblemInstance, RecordError> {
        if self.schema != INSTANCE_SCHEMA {
            return Err(RecordError::BadSchema {
                got: self.schema,
                expected: INSTANCE_SCHEMA.into(),
            });
        }
        if self.x.len() != self.n * self.d || self.y.len() != self.n {
            return Err(RecordError::Malformed(format!(
                "payload sizes {}/{} do not match {} x {}",
                self.x.len(),
                self.y.len(),
                self.n,
                self.d
            )));
        }
        let x = DenseMatrix::from_col_major(self.n, self.d, vec_from_hex(&self.x)?);
        let y = vec_from_hex(&self.y)?;
        ProblemInstance::new(x, y, self.meta).map_err(|e| RecordError::Malformed(e.to_string()))
    }
}

/// One serialized segment; signs use the compact `+ - 0` string form.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SegmentRecord {
    pub lambda_hi: String,
    pub lambda_lo: String,
    pub signs: String,
    pub active: Vec<usize>,
    pub a: Vec<String>,
    pub b: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PathRecord {
    pub schema: String,
    pub precision: PrecisionMode,
    pub count: usize,
    pub lambda_max: String,
    pub lambda_min: f64,
    pub max_kkt_violation: f64,
    pub tie_events: usize,
    pub segments: Vec<SegmentRecord>,
}

fn signs_to_string(signs: &[i8]) -> String {
    signs
        .iter()
        .map(|s| match s {
            1 => '+',
            -1 => '-',
            _ => '0',
        })
        .collect()
}

fn signs_from_string(s: &str) -> Result<Vec<i8>, RecordError> {
    s.chars()
        .map(|c| match c {
            '+' => Ok(1),
            '-' => Ok(-1),
            '0' => Ok(0),
            other => Err(RecordError::Malformed(format!("bad sign char `{other}`"))),
        })
        .collect()
}

impl PathRecord {
    pub fn from_path<S: HexScalar>(path: &RegularizationPath<S>) -> Self {
        PathRecord {
            schema: PATH_SCHEMA.into(),
            precision: path.diagnostics.precision,
            count: path.count(),
            lambda_max: path.lambda_max.to_hex(),
            lambda_min: path.lambda_min,
            max_kkt_violation: path.diagnostics.max_kkt_violation,
            tie_events: path.diagnostics.tie_events,
            segments: path
                .segments
                .iter()
                .map(|seg| SegmentRecord {
                    lambda_hi: seg.lambda_hi.to_hex(),
                    lambda_lo: seg.lambda_lo.to_hex(),
                    signs: signs_to_string(&seg.signs),
                    active: seg.active.clone(),
                    a: vec_to_hex(&seg.a),
                    b: vec_to_hex(&seg.b),
                })
                .collect(),
        }
    }

    pub fn into_path<S: HexScalar>(self) -> Result<RegularizationPath<S>, RecordError> {
        if self.schema != PATH_SCHEMA {
            return Err(RecordError::BadSchema {
                got: self.schema,
                expected: PATH_SCHEMA.into(),
            });
        }
        let segments = self
            .segments
            .iter()
            .map(|r| -> Result<PathSegment<S>, RecordError> {
                Ok(PathSegment {
                    lambda_hi: S::from_hex(&r.lambda_hi)?,
                    lambda_lo: S::from_hex(&r.lambda_lo)?,
                    signs: signs_from_string(&r.signs)?,
                    active: r.active.clone(),
                    a: vec_from_hex(&r.a)?,
                    b: vec_from_hex(&r.b)?,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(RegularizationPath {
            segments,
            lambda_max: S::from_hex(&self.lambda_max)?,
            lambda_min: self.lambda_min,
            diagnostics: PathDiagnostics {
                precision: self.precision,
                max_kkt_violation: self.max_kkt_violation,
                tie_events: self.tie_events,
            },
        })
    }
}
