//! The scalar abstraction every numerical routine is generic over.
//!
//! `Standard` mode computes in native `f64` (53-bit significand); `Extended`
//! mode computes in double-double pairs (106-bit effective significand).
//! Instances are always stored in `f64` — generators only produce exactly
//! representable entries — and promoted losslessly into the working scalar,
//! so both modes operate on bit-identical problems.

use std::fmt::{Debug, Display};
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::dd::Dd;

/// Working precision of a solve.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrecisionMode {
    /// Native `f64`: at least 53 significand bits.
    Standard,
    /// Pair arithmetic: at least 106 effective significand bits.
    Extended,
}

impl PrecisionMode {
    pub fn name(self) -> &'static str {
        match self {
            PrecisionMode::Standard => "standard",
            PrecisionMode::Extended => "extended",
        }
    }

    /// Unit roundoff of the mode.
    pub fn epsilon(self) -> f64 {
        match self {
            PrecisionMode::Standard => f64::EPSILON,
            PrecisionMode::Extended => Dd::EPSILON,
        }
    }
}

impl std::str::FromStr for PrecisionMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "standard" | "std" | "f64" => Ok(PrecisionMode::Standard),
            "extended" | "ext" | "dd" => Ok(PrecisionMode::Extended),
            other => Err(format!("unknown precision mode `{other}`")),
        }
    }
}

/// Real scalar usable by the solvers. Implemented for `f64` and [`Dd`].
pub trait Scalar:
    Copy
    + Clone
    + Debug
    + Display
    + Default
    + PartialEq
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Send
    + Sync
    + 'static
{
    const MODE: PrecisionMode;

    fn zero() -> Self;
    fn one() -> Self;
    fn infinity() -> Self;
    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn abs(self) -> Self;
    fn sqrt(self) -> Self;
    fn is_finite(self) -> bool;
    fn max(self, other: Self) -> Self;
    fn min(self, other: Self) -> Self;

    /// Unit roundoff.
    fn epsilon() -> f64 {
        Self::MODE.epsilon()
    }

    fn from_usize(n: usize) -> Self {
        Self::from_f64(n as f64)
    }
}

impl Scalar for f64 {
    const MODE: PrecisionMode = PrecisionMode::Standard;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn infinity() -> Self {
        f64::INFINITY
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
    fn max(self, other: Self) -> Self {
        f64::max(self, other)
    }
    fn min(self, other: Self) -> Self {
        f64::min(self, other)
    }
}

impl Scalar for Dd {
    const MODE: PrecisionMode = PrecisionMode::Extended;

    fn zero() -> Self {
        Dd::ZERO
    }
    fn one() -> Self {
        Dd::ONE
    }
    fn infinity() -> Self {
        Dd::new(f64::INFINITY, 0.0)
    }
    fn from_f64(x: f64) -> Self {
        Dd::from_f64(x)
    }
    fn to_f64(self) -> f64 {
        Dd::to_f64(self)
    }
    fn abs(self) -> Self {
        Dd::abs(self)
    }
    fn sqrt(self) -> Self {
        Dd::sqrt(self)
    }
    fn is_finite(self) -> bool {
        Dd::is_finite(self)
    }
    fn max(self, other: Self) -> Self {
        Dd::max(self, other)
    }
    fn min(self, other: Self) -> Self {
        Dd::min(self, other)
    }
}
