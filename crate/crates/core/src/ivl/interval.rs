use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::round;
use crate::error::{Error, Result};

/// A closed real interval `[lo, hi]` with outward-rounded arithmetic.
///
/// Endpoints may be infinite but never NaN, and `lo <= hi` always holds.
#[derive(Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// `binary(a, b, op)`: the enclosure of `{x op y : x in a, y in b}`.
pub fn binary(a: Interval, b: Interval, op: BinOp) -> Result<Interval> {
    Ok(match op {
        BinOp::Add => a + b,
        BinOp::Sub => a - b,
        BinOp::Mul => a * b,
        BinOp::Div => a.div(b)?,
    })
}

impl Interval {
    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };
    pub const ONE: Interval = Interval { lo: 1.0, hi: 1.0 };
    pub const ENTIRE: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
            return Err(Error::InvalidInterval { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    /// Compile-time constructor; the caller guarantees `lo <= hi`.
    pub(crate) const fn from_bounds(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    /// Internal constructor for bounds already known to be ordered.
    #[inline]
    pub(crate) fn raw(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "raw interval [{lo}, {hi}]");
        Self { lo, hi }
    }

    #[inline]
    pub fn point(x: f64) -> Self {
        assert!(x.is_finite(), "point interval from non-finite {x}");
        Self { lo: x, hi: x }
    }

    /// `[mid - rad, mid + rad]`, rounded outward.
    pub fn around(mid: f64, rad: f64) -> Self {
        let rad = rad.abs();
        Self::raw(round::sub_down(mid, rad), round::add_up(mid, rad))
    }

    #[inline]
    pub fn lo(&self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn hi(&self) -> f64 {
        self.hi
    }

    /// Upper bound on `hi - lo`.
    pub fn width(&self) -> f64 {
        round::sub_up(self.hi, self.lo)
    }

    pub fn rad(&self) -> f64 {
        self.width() * 0.5
    }

    /// A point inside the interval, close to the centre.
    pub fn mid(&self) -> f64 {
        match (self.lo.is_finite(), self.hi.is_finite()) {
            (true, true) => {
                let m = 0.5 * self.lo + 0.5 * self.hi;
                m.clamp(self.lo, self.hi)
            }
            (false, false) => 0.0,
            (true, false) => self.lo.max(0.0),
            (false, true) => self.hi.min(0.0),
        }
    }

    /// Largest absolute value.
    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// Smallest absolute value.
    pub fn mig(&self) -> f64 {
        if self.contains_zero() {
            0.0
        } else {
            self.lo.abs().min(self.hi.abs())
        }
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(0.0)
    }

    pub fn subset(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// Strict inclusion on both sides.
    pub fn subset_interior(&self, other: &Interval) -> bool {
        other.lo < self.lo && self.hi < other.hi
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Self::raw(self.lo.min(other.lo), self.hi.max(other.hi))
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then(|| Self::raw(lo, hi))
    }

    pub fn abs(self) -> Interval {
        if self.lo >= 0.0 {
            self
        } else if self.hi <= 0.0 {
            -self
        } else {
            Self::raw(0.0, self.mag())
        }
    }

    pub fn min(self, other: Interval) -> Interval {
        Self::raw(self.lo.min(other.lo), self.hi.min(other.hi))
    }

    pub fn max(self, other: Interval) -> Interval {
        Self::raw(self.lo.max(other.lo), self.hi.max(other.hi))
    }

    /// Inflates by `r` on both sides.
    pub fn inflate(self, r: f64) -> Interval {
        Self::raw(round::sub_down(self.lo, r), round::add_up(self.hi, r))
    }

    /// Fallible division; there is deliberately no `Div` impl.
    #[allow(clippy::should_implement_trait)]
    pub fn div(self, rhs: Interval) -> Result<Interval> {
        if rhs.contains_zero() {
            return Err(Error::DivisionByZeroInterval(rhs));
        }
        let cands_lo = [
            round::div_down(self.lo, rhs.lo),
            round::div_down(self.lo, rhs.hi),
            round::div_down(self.hi, rhs.lo),
            round::div_down(self.hi, rhs.hi),
        ];
        let cands_hi = [
            round::div_up(self.lo, rhs.lo),
            round::div_up(self.lo, rhs.hi),
            round::div_up(self.hi, rhs.lo),
            round::div_up(self.hi, rhs.hi),
        ];
        Ok(Self::raw(min4(cands_lo), max4(cands_hi)))
    }

    pub fn recip(self) -> Result<Interval> {
        Interval::ONE.div(self)
    }

    pub fn sqr(self) -> Interval {
        let a = self.abs();
        Self::raw(round::mul_down(a.lo, a.lo), round::mul_up(a.hi, a.hi))
    }

    pub fn scale(self, k: f64) -> Interval {
        self * Interval::point(k)
    }
}

#[inline]
fn min4(v: [f64; 4]) -> f64 {
    v[0].min(v[1]).min(v[2].min(v[3]))
}

#[inline]
fn max4(v: [f64; 4]) -> f64 {
    v[0].max(v[1]).max(v[2].max(v[3]))
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, rhs: Interval) -> Interval {
        Interval::raw(
            round::add_down(self.lo, rhs.lo),
            round::add_up(self.hi, rhs.hi),
        )
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, rhs: Interval) -> Interval {
        Interval::raw(
            round::sub_down(self.lo, rhs.hi),
            round::sub_up(self.hi, rhs.lo),
        )
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, rhs: Interval) -> Interval {
        let (a, b) = (self, rhs);
        // Point times interval is the hot path in the Krawczyk operator.
        if a.lo == a.hi {
            let k = a.lo;
            return if k >= 0.0 {
                Interval::raw(round::mul_down(k, b.lo), round::mul_up(k, b.hi))
            } else {
                Interval::raw(round::mul_down(k, b.hi), round::mul_up(k, b.lo))
            };
        }
        let lo = min4([
            round::mul_down(a.lo, b.lo),
            round::mul_down(a.lo, b.hi),
            round::mul_down(a.hi, b.lo),
            round::mul_down(a.hi, b.hi),
        ]);
        let hi = max4([
            round::mul_up(a.lo, b.lo),
            round::mul_up(a.lo, b.hi),
            round::mul_up(a.hi, b.lo),
            round::mul_up(a.hi, b.hi),
        ]);
        Interval::raw(lo, hi)
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval::raw(-self.hi, -self.lo)
    }
}

impl Add<f64> for Interval {
    type Output = Interval;
    fn add(self, rhs: f64) -> Interval {
        self + Interval::point(rhs)
    }
}

impl Sub<f64> for Interval {
    type Output = Interval;
    fn sub(self, rhs: f64) -> Interval {
        self - Interval::point(rhs)
    }
}

impl Mul<f64> for Interval {
    type Output = Interval;
    fn mul(self, rhs: f64) -> Interval {
        Interval::point(rhs) * self
    }
}

impl From<f64> for Interval {
    fn from(x: f64) -> Self {
        Interval::point(x)
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}, {:?}]", self.lo, self.hi)
    }
}

/// Prints the shortest decimal forms that round-trip to the stored endpoints.
impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.lo, self.hi].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [lo, hi] = <[f64; 2]>::deserialize(d)?;
        Interval::new(lo, hi).map_err(serde::de::Error::custom)
    }
}
