//! Double-double arithmetic: an unevaluated sum of two `f64` values giving
//! roughly 106 bits of significand (about 32 decimal digits).
//!
//! The error-free transformations below (`two_sum`, `two_prod`, Dekker's
//! `split`) are the classical building blocks; no FMA is required, so results
//! are identical on any IEEE-754 platform.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

/// A double-double number `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Copy, Clone, Debug, Default, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

/// Error-free sum: returns `(s, e)` with `s = fl(a + b)` and `a + b = s + e`.
#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let v = s - a;
    let e = (a - (s - v)) + (b - v);
    (s, e)
}

/// Like `two_sum` but assumes `|a| >= |b|`.
#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let e = b - (s - a);
    (s, e)
}

/// Dekker split of a 53-bit float into two 26-bit halves.
#[inline]
fn split(a: f64) -> (f64, f64) {
    const C: f64 = 134217729.0; // 2^27 + 1
    let t = C * a;
    let hi = t - (t - a);
    let lo = a - hi;
    (hi, lo)
}

/// Error-free product: returns `(p, e)` with `p = fl(a * b)` and `a * b = p + e`.
#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    let e = ((ah * bh - p) + ah * bl + al * bh) + al * bl;
    (p, e)
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    /// Unit roundoff of the format, 2^-106.
    pub const EPSILON: f64 = 1.232_595_164_407_831e-32;

    #[inline]
    pub const fn new(hi: f64, lo: f64) -> Self {
        Dd { hi, lo }
    }

    #[inline]
    pub fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    /// Nearest `f64`.
    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn abs(self) -> Self {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.hi == 0.0 && self.lo == 0.0
    }

    /// Square root via one Newton step on the `f64` seed; accurate to full
    /// double-double precision for normal inputs.
    pub fn sqrt(self) -> Self {
        if self.is_zero() {
            return Dd::ZERO;
        }
        if self.hi < 0.0 {
            return Dd::new(f64::NAN, 0.0);
        }
        let x = 1.0 / self.hi.sqrt();
        let ax = self.hi * x;
        let ax_dd = Dd::from_f64(ax);
        let err = self - ax_dd * ax_dd;
        ax_dd + Dd::from_f64(err.hi * (x * 0.5))
    }

    pub fn max(self, other: Self) -> Self {
        if self < other {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn powi(self, n: i32) -> Self {
        match n.cmp(&0) {
            Ordering::Equal => Dd::ONE,
            Ordering::Less => Dd::ONE / self.powi(-n),
            Ordering::Greater => {
                let mut base = self;
                let mut exp = n as u32;
                let mut acc = Dd::ONE;
                while exp > 0 {
                    if exp & 1 == 1 {
                        acc *= base;
                    }
                    base *= base;
                    exp >>= 1;
                }
                acc
            }
        }
    }
}

impl Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, rhs: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, rhs.hi);
        let (t1, t2) = two_sum(self.lo, rhs.lo);
        let (s1, s2) = {
            let s2 = s2 + t1;
            quick_two_sum(s1, s2)
        };
        let s2 = s2 + t2;
        let (hi, lo) = quick_two_sum(s1, s2);
        Dd { hi, lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, rhs: Dd) -> Dd {
        self + (-rhs)
    }
}

impl Mul for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, rhs: Dd) -> Dd {
        let (p1, p2) = two_prod(self.hi, rhs.hi);
        let p2 = p2 + self.hi * rhs.lo + self.lo * rhs.hi;
        let (hi, lo) = quick_two_sum(p1, p2);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, rhs: Dd) -> Dd {
        // Long division: three quotient terms then renormalize.
        let q1 = self.hi / rhs.hi;
        if !q1.is_finite() {
            return Dd::new(q1, 0.0);
        }
        let r = self - rhs * Dd::from_f64(q1);
        let q2 = r.hi / rhs.hi;
        let r = r - rhs * Dd::from_f64(q2);
        let q3 = r.hi / rhs.hi;
        let (s, e) = quick_two_sum(q1, q2);
        Dd { hi: s, lo: e } + Dd::from_f64(q3)
    }
}

impl Neg for Dd {
    type Output = Dd;
    #[inline]
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl AddAssign for Dd {
    #[inline]
    fn add_assign(&mut self, rhs: Dd) {
        *self = *self + rhs;
    }
}
impl SubAssign for Dd {
    #[inline]
    fn sub_assign(&mut self, rhs: Dd) {
        *self = *self - rhs;
    }
}
impl MulAssign for Dd {
    #[inline]
    fn mul_assign(&mut self, rhs: Dd) {
        *self = *self * rhs;
    }
}
impl DivAssign for Dd {
    #[inline]
    fn div_assign(&mut self, rhs: Dd) {
        *self = *self / rhs;
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            ord => ord,
        }
    }
}

impl fmt::Display for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Display rounds to f64; the hex record format preserves both limbs.
        write!(f, "{}", self.to_f64())
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Self {
        Dd::from_f64(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_tracks_cancelled_bits() {
        let a = Dd::from_f64(1.0);
        let b = Dd::from_f64(1e-20);
        let s = a + b;
        assert_eq!(s.hi, 1.0);
        assert_eq!(s.lo, 1e-20);
        let diff = s - a;
        assert_eq!(diff.to_f64(), 1e-20);
    }

    #[test]
    fn mul_exact_for_small_integers() {
        let a = Dd::from_f64(3.0);
        let b = Dd::from_f64(7.0);
        assert_eq!((a * b).hi, 21.0);
        assert_eq!((a * b).lo, 0.0);
    }

    #[test]
    fn div_recovers_factor() {
        let a = Dd::from_f64(1.0) / Dd::from_f64(3.0);
        let b = a * Dd::from_f64(3.0);
        let err = (b - Dd::ONE).abs();
        assert!(err.to_f64() < 1e-31, "err = {:e}", err.to_f64());
    }

    #[test]
    fn sqrt_squares_back() {
        for &v in &[2.0, 10.0, 0.5, 12345.6789, 1e-20, 3e11] {
            let s = Dd::from_f64(v).sqrt();
            let back = s * s - Dd::from_f64(v);
            assert!(
                back.to_f64().abs() <= 4.0 * Dd::EPSILON * v,
                "v = {v}: residual {:e}",
                back.to_f64()
            );
        }
    }

    #[test]
    fn one_third_has_29_plus_digits() {
        // 1/3 = 0.333...; hi+lo should carry the tail far beyond f64.
        let third = Dd::ONE / Dd::from_f64(3.0);
        let three_thirds = third + third + third;
        assert!((three_thirds - Dd::ONE).abs().to_f64() < 1e-31);
    }

    #[test]
    fn ordering_uses_both_limbs() {
        let a = Dd::new(1.0, 1e-20);
        let b = Dd::new(1.0, 2e-20);
        assert!(a < b);
        assert!(b > a);
        assert!(a < Dd::new(2.0, -1.0));
    }

    #[test]
    fn powi_matches_repeated_multiplication() {
        let x = Dd::from_f64(1.5);
        let mut acc = Dd::ONE;
        for _ in 0..9 {
            acc *= x;
        }
        assert!(((x.powi(9) - acc) / acc).abs().to_f64() < 1e-30);
        assert!((x.powi(-2) - Dd::ONE / (x * x)).abs().to_f64() < 1e-30);
    }
}
