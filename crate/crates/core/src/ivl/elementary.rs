//! Elementary functions on intervals.
//!
//! Endpoint values come from the platform libm (round-to-nearest, sub-ulp
//! accurate for these functions) and are then pushed outward by
//! [`LIBM_ULPS`] ulps. Periodic functions detect interior extrema against
//! interval enclosures of pi, so an extremum is included whenever it cannot
//! be ruled out.

use super::interval::Interval;
use super::round;
use crate::error::{Error, Result};

/// Outward bump applied to every libm endpoint value.
pub const LIBM_ULPS: u32 = 2;

/// Enclosure of pi: `std::f64::consts::PI` is the float just below pi.
pub const PI: Interval = Interval::from_bounds(std::f64::consts::PI, 3.141_592_653_589_793_6);
pub const TWO_PI: Interval = Interval::from_bounds(std::f64::consts::TAU, 6.283_185_307_179_587);
pub const HALF_PI: Interval =
    Interval::from_bounds(std::f64::consts::FRAC_PI_2, 1.570_796_326_794_896_8);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ElemFn {
    Sin,
    Cos,
    Tan,
    Exp,
    Ln,
    Sqrt,
    Arcsin,
    Sqr,
}

/// `elem(f, x)`: enclosure of `f(x)`.
pub fn elem(f: ElemFn, x: Interval) -> Result<Interval> {
    match f {
        ElemFn::Sin => Ok(x.sin()),
        ElemFn::Cos => Ok(x.cos()),
        ElemFn::Tan => x.tan(),
        ElemFn::Exp => Ok(x.exp()),
        ElemFn::Ln => x.ln(),
        ElemFn::Sqrt => x.sqrt(),
        ElemFn::Arcsin => x.asin(),
        ElemFn::Sqr => Ok(x.sqr()),
    }
}

#[inline]
fn down(v: f64) -> f64 {
    round::ulps_down(v, LIBM_ULPS)
}

#[inline]
fn up(v: f64) -> f64 {
    round::ulps_up(v, LIBM_ULPS)
}

/// Whether `phase + k * period` may lie in `x` for some integer `k`.
/// Never returns a false negative.
fn may_hit(x: Interval, phase: Interval, period: Interval) -> bool {
    let t_lo = (Interval::point(x.lo()) - phase)
        .div(period)
        .map(|t| t.lo());
    let t_hi = (Interval::point(x.hi()) - phase)
        .div(period)
        .map(|t| t.hi());
    match (t_lo, t_hi) {
        (Ok(a), Ok(b)) => a.ceil() <= b.floor(),
        _ => true,
    }
}

/// Shared shape of sin and cos: extrema at `max_phase + 2k pi` and
/// `min_phase + 2k pi`, monotone in between.
fn periodic(x: Interval, f: fn(f64) -> f64, max_phase: Interval, min_phase: Interval) -> Interval {
    if !x.is_finite() {
        return Interval::raw(-1.0, 1.0);
    }
    let (fa, fb) = (f(x.lo()), f(x.hi()));
    let hi = if may_hit(x, max_phase, TWO_PI) {
        1.0
    } else {
        up(fa.max(fb)).min(1.0)
    };
    let lo = if may_hit(x, min_phase, TWO_PI) {
        -1.0
    } else {
        down(fa.min(fb)).max(-1.0)
    };
    Interval::raw(lo, hi)
}

impl Interval {
    pub fn sin(self) -> Interval {
        periodic(self, f64::sin, HALF_PI, -HALF_PI)
    }

    pub fn cos(self) -> Interval {
        periodic(self, f64::cos, Interval::ZERO, PI)
    }

    /// `sin(2 pi x)`, reducing `x` by an integer first (the map lifts are
    /// 1-periodic, and this keeps `2 pi x` small).
    pub fn sin_2pi(self) -> Interval {
        (TWO_PI * self.reduce_unit()).sin()
    }

    pub fn cos_2pi(self) -> Interval {
        (TWO_PI * self.reduce_unit()).cos()
    }

    fn reduce_unit(self) -> Interval {
        if !self.is_finite() {
            return self;
        }
        let n = self.mid().round();
        if n == 0.0 || n.abs() > 4.5e15 {
            return self;
        }
        self - Interval::point(n)
    }

    pub fn tan(self) -> Result<Interval> {
        if !self.is_finite() || may_hit(self, HALF_PI, PI) {
            return Err(Error::TanPole(self));
        }
        Ok(Interval::raw(down(self.lo().tan()), up(self.hi().tan())))
    }

    pub fn exp(self) -> Interval {
        let lo = if self.lo() == f64::NEG_INFINITY {
            0.0
        } else {
            down(self.lo().exp()).max(0.0)
        };
        let hi = up(self.hi().exp());
        Interval::raw(lo, hi)
    }

    pub fn ln(self) -> Result<Interval> {
        if !(self.lo() > 0.0) {
            return Err(Error::Domain {
                func: "ln",
                arg: self,
            });
        }
        Ok(Interval::raw(down(self.lo().ln()), up(self.hi().ln())))
    }

    pub fn sqrt(self) -> Result<Interval> {
        if !(self.lo() >= 0.0) {
            return Err(Error::Domain {
                func: "sqrt",
                arg: self,
            });
        }
        Ok(Interval::raw(
            round::sqrt_down(self.lo()),
            round::sqrt_up(self.hi()),
        ))
    }

    pub fn asin(self) -> Result<Interval> {
        if self.lo() < -1.0 || self.hi() > 1.0 {
            return Err(Error::Domain {
                func: "arcsin",
                arg: self,
            });
        }
        let lo = down(self.lo().asin()).max(-HALF_PI.hi());
        let hi = up(self.hi().asin()).min(HALF_PI.hi());
        Ok(Interval::raw(lo, hi))
    }
}
