//! Directed rounding emulated on top of round-to-nearest.
//!
//! Each basic operation is computed once in round-to-nearest, the exact
//! rounding error is recovered with an error-free transformation (TwoSum,
//! FMA residual), and the result is stepped one ulp only when the error
//! points the wrong way. Exact operations therefore stay exact. Outside the
//! range where the transformations are exact (overflow, results near the
//! subnormal range) we fall back to an unconditional one-ulp step.

/// Below this magnitude FMA residuals may themselves be rounded.
const TINY: f64 = 1e-290;
/// Above this magnitude intermediate products in the residuals may overflow.
const HUGE: f64 = 1e300;

#[inline]
fn safe(x: f64) -> bool {
    let a = x.abs();
    a == 0.0 || (a > TINY && a < HUGE)
}

#[inline]
fn two_sum_err(a: f64, b: f64, s: f64) -> f64 {
    let bb = s - a;
    (a - (s - bb)) + (b - bb)
}

#[inline]
fn overflow_down(s: f64) -> f64 {
    if s == f64::INFINITY {
        f64::MAX
    } else {
        s
    }
}

#[inline]
fn overflow_up(s: f64) -> f64 {
    if s == f64::NEG_INFINITY {
        f64::MIN
    } else {
        s
    }
}

pub fn add_down(a: f64, b: f64) -> f64 {
    let s = a + b;
    if !s.is_finite() {
        return if a.is_finite() && b.is_finite() {
            overflow_down(s)
        } else {
            s
        };
    }
    if two_sum_err(a, b, s) < 0.0 {
        s.next_down()
    } else {
        s
    }
}

pub fn add_up(a: f64, b: f64) -> f64 {
    let s = a + b;
    if !s.is_finite() {
        return if a.is_finite() && b.is_finite() {
            overflow_up(s)
        } else {
            s
        };
    }
    if two_sum_err(a, b, s) > 0.0 {
        s.next_up()
    } else {
        s
    }
}

#[inline]
pub fn sub_down(a: f64, b: f64) -> f64 {
    add_down(a, -b)
}

#[inline]
pub fn sub_up(a: f64, b: f64) -> f64 {
    add_up(a, -b)
}

/// Product with the interval convention `0 * inf = 0`.
#[inline]
fn raw_mul(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        a * b
    }
}

pub fn mul_down(a: f64, b: f64) -> f64 {
    let p = raw_mul(a, b);
    if p == 0.0 {
        return if a == 0.0 || b == 0.0 {
            0.0
        } else {
            p.next_down()
        };
    }
    if !p.is_finite() {
        return if a.is_finite() && b.is_finite() {
            overflow_down(p)
        } else {
            p
        };
    }
    if !safe(p) || !safe(a) || !safe(b) {
        return p.next_down();
    }
    if a.mul_add(b, -p) < 0.0 {
        p.next_down()
    } else {
        p
    }
}

pub fn mul_up(a: f64, b: f64) -> f64 {
    let p = raw_mul(a, b);
    if p == 0.0 {
        return if a == 0.0 || b == 0.0 {
            0.0
        } else {
            p.next_up()
        };
    }
    if !p.is_finite() {
        return if a.is_finite() && b.is_finite() {
            overflow_up(p)
        } else {
            p
        };
    }
    if !safe(p) || !safe(a) || !safe(b) {
        return p.next_up();
    }
    if a.mul_add(b, -p) > 0.0 {
        p.next_up()
    } else {
        p
    }
}

/// Sign of `a/b - fl(a/b)`: positive when the rounded quotient is too small.
#[inline]
fn div_residual_sign(a: f64, b: f64, q: f64) -> f64 {
    let r = (-q).mul_add(b, a);
    if b > 0.0 {
        r
    } else {
        -r
    }
}

pub fn div_down(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    let q = a / b;
    if q == 0.0 {
        return q.next_down();
    }
    if !q.is_finite() {
        return if a.is_finite() { overflow_down(q) } else { q };
    }
    if b.is_infinite() || !safe(q) || !safe(a) || !safe(b) {
        return q.next_down();
    }
    if div_residual_sign(a, b, q) < 0.0 {
        q.next_down()
    } else {
        q
    }
}

pub fn div_up(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    let q = a / b;
    if q == 0.0 {
        return q.next_up();
    }
    if !q.is_finite() {
        return if a.is_finite() { overflow_up(q) } else { q };
    }
    if b.is_infinite() || !safe(q) || !safe(a) || !safe(b) {
        return q.next_up();
    }
    if div_residual_sign(a, b, q) > 0.0 {
        q.next_up()
    } else {
        q
    }
}

pub fn sqrt_down(x: f64) -> f64 {
    let s = x.sqrt();
    if s == 0.0 || !s.is_finite() {
        return s;
    }
    if !safe(x) {
        return s.next_down().max(0.0);
    }
    if (-s).mul_add(s, x) < 0.0 {
        s.next_down()
    } else {
        s
    }
}

pub fn sqrt_up(x: f64) -> f64 {
    let s = x.sqrt();
    if !s.is_finite() {
        return s;
    }
    if s == 0.0 {
        return if x == 0.0 { 0.0 } else { s.next_up() };
    }
    if !safe(x) {
        return s.next_up();
    }
    if (-s).mul_add(s, x) > 0.0 {
        s.next_up()
    } else {
        s
    }
}

/// Steps `x` down by `n` ulps (used to bump libm results).
#[inline]
pub fn ulps_down(mut x: f64, n: u32) -> f64 {
    for _ in 0..n {
        x = x.next_down();
    }
    x
}

#[inline]
pub fn ulps_up(mut x: f64, n: u32) -> f64 {
    for _ in 0..n {
        x = x.next_up();
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_operations_stay_exact() {
        assert_eq!(add_down(1.0, 3.0), 4.0);
        assert_eq!(add_up(2.0, 4.0), 6.0);
        assert_eq!(mul_down(-1.0, 4.0), -4.0);
        assert_eq!(div_up(1.0, 0.5), 2.0);
        assert_eq!(sqrt_down(4.0), 2.0);
    }

    #[test]
    fn inexact_operations_bracket() {
        let lo = div_down(1.0, 3.0);
        let hi = div_up(1.0, 3.0);
        assert!(lo < hi);
        assert_eq!(lo.next_up(), hi);
        assert!(add_down(0.1, 0.2) < add_up(0.1, 0.2));
        assert!(sqrt_down(2.0) < sqrt_up(2.0));
    }

    #[test]
    fn overflow_saturates_on_the_inner_side() {
        assert_eq!(add_down(f64::MAX, f64::MAX), f64::MAX);
        assert_eq!(add_up(f64::MAX, f64::MAX), f64::INFINITY);
        assert_eq!(mul_down(0.0, f64::INFINITY), 0.0);
    }
}
