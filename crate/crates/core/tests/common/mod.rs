//! Oracles shared by the integration tests and the acceptance run.
//!
//! Arithmetic is checked exactly in rationals. Elementary functions are
//! checked against 256-bit floats rounded down and up, so the oracle
//! itself brackets the true value.

#![allow(dead_code)]

use annular_cap::ivl::{BinOp, ElemFn};
use annular_cap::Interval;
use astro_float::{BigFloat, Consts, RoundingMode};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;

pub const ORACLE_BITS: usize = 256;

pub fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite")
}

/// Exact `x op y`, `None` for division by zero.
pub fn exact_binary(x: f64, y: f64, op: BinOp) -> Option<BigRational> {
    let (a, b) = (rational(x), rational(y));
    Some(match op {
        BinOp::Add => a + b,
        BinOp::Sub => a - b,
        BinOp::Mul => a * b,
        BinOp::Div => {
            if b.is_zero() {
                return None;
            }
            a / b
        }
    })
}

pub fn contains_rational(i: &Interval, v: &BigRational) -> bool {
    let lo_ok = !i.lo().is_finite() || rational(i.lo()) <= *v;
    let hi_ok = !i.hi().is_finite() || *v <= rational(i.hi());
    lo_ok && hi_ok
}

/// Random finite interval; magnitudes spread over many binades.
pub fn random_interval<R: Rng>(rng: &mut R) -> Interval {
    let scale = 10f64.powi(rng.gen_range(-8..=8));
    let a = rng.gen_range(-1.0..1.0) * scale;
    let w = match rng.gen_range(0..4) {
        0 => 0.0,
        1 => rng.gen_range(0.0..1e-12) * scale,
        _ => rng.gen_range(0.0..1.0) * scale,
    };
    Interval::new(a, a + w).unwrap()
}

/// Endpoints plus random interior points.
pub fn samples<R: Rng>(i: &Interval, rng: &mut R, extra: usize) -> Vec<f64> {
    let mut out = vec![i.lo(), i.hi()];
    for _ in 0..extra {
        let t: f64 = rng.gen();
        let x = i.lo() + t * (i.hi() - i.lo());
        if i.contains(x) {
            out.push(x);
        }
    }
    out
}

/// Violations found over `n` random binary operations.
pub fn fuzz_arithmetic<R: Rng>(rng: &mut R, n: usize) -> usize {
    let ops = [BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div];
    let mut bad = 0;
    for k in 0..n {
        let op = ops[k % 4];
        let (a, b) = (random_interval(rng), random_interval(rng));
        let Ok(r) = annular_cap::ivl::binary(a, b, op) else {
            assert!(op == BinOp::Div && b.contains_zero());
            continue;
        };
        let xs = samples(&a, rng, 2);
        let ys = samples(&b, rng, 2);
        'pairs: for &x in &xs {
            for &y in &ys {
                if let Some(v) = exact_binary(x, y, op) {
                    if !contains_rational(&r, &v) {
                        eprintln!(
                            "violation: {a:?} {op:?} {b:?} = {r:?} misses {x:e} {op:?} {y:e}"
                        );
                        bad += 1;
                        break 'pairs;
                    }
                }
            }
        }
    }
    bad
}

/// Exact square through rationals.
pub fn exact_sqr(x: f64) -> BigRational {
    let r = rational(x);
    &r * &r
}

pub struct BigOracle {
    cc: Consts,
}

impl Default for BigOracle {
    fn default() -> Self {
        Self::new()
    }
}

impl BigOracle {
    pub fn new() -> Self {
        Self {
            cc: Consts::new().expect("constants cache"),
        }
    }

    fn eval(&mut self, f: ElemFn, x: f64, rm: RoundingMode) -> BigFloat {
        let p = ORACLE_BITS;
        let b = BigFloat::from_f64(x, p);
        let cc = &mut self.cc;
        match f {
            ElemFn::Sin => b.sin(p, rm, cc),
            ElemFn::Cos => b.cos(p, rm, cc),
            ElemFn::Tan => b.tan(p, rm, cc),
            ElemFn::Exp => b.exp(p, rm, cc),
            ElemFn::Ln => b.ln(p, rm, cc),
            ElemFn::Sqrt => b.sqrt(p, rm),
            ElemFn::Arcsin => b.asin(p, rm, cc),
            ElemFn::Sqr => b.mul(&b, p, rm),
        }
    }

    /// Whether `[f(x)]` rounded down and up both lie in `i`.
    pub fn encloses(&mut self, i: &Interval, f: ElemFn, x: f64) -> bool {
        let lo = self.eval(f, x, RoundingMode::Down);
        let hi = self.eval(f, x, RoundingMode::Up);
        if lo.is_nan() || hi.is_nan() {
            return true;
        }
        let below = BigFloat::from_f64(i.lo(), 64);
        let above = BigFloat::from_f64(i.hi(), 64);
        let ge = |a: &BigFloat, b: &BigFloat| a.cmp(b).is_some_and(|c| c >= 0);
        (i.lo() == f64::NEG_INFINITY || ge(&lo, &below))
            && (i.hi() == f64::INFINITY || ge(&above, &hi))
    }

    /// `sin(2 pi x)` or `cos(2 pi x)` bracketed through a 2 pi enclosure.
    pub fn encloses_2pi(&mut self, i: &Interval, cosine: bool, x: f64) -> bool {
        let p = ORACLE_BITS;
        let pi = self.cc.pi(p, RoundingMode::ToEven);
        let two = BigFloat::from_f64(2.0, p);
        let t = pi.mul(&two, p, RoundingMode::ToEven).mul(
            &BigFloat::from_f64(x, p),
            p,
            RoundingMode::ToEven,
        );
        let v = if cosine {
            t.cos(p, RoundingMode::ToEven, &mut self.cc)
        } else {
            t.sin(p, RoundingMode::ToEven, &mut self.cc)
        };
        // The argument error is below 2^-200 relative; widen by that.
        let slack = BigFloat::from_f64(2f64.powi(-190) * (1.0 + x.abs()), p);
        let ge = |a: &BigFloat, b: &BigFloat| a.cmp(b).is_some_and(|c| c >= 0);
        // Sine and cosine never leave [-1, 1], whatever the slack says.
        let (one, minus_one) = (BigFloat::from_f64(1.0, p), BigFloat::from_f64(-1.0, p));
        let mut lo = v.sub(&slack, p, RoundingMode::Down);
        if !ge(&lo, &minus_one) {
            lo = minus_one;
        }
        let mut hi = v.add(&slack, p, RoundingMode::Up);
        if !ge(&one, &hi) {
            hi = one;
        }
        ge(&lo, &BigFloat::from_f64(i.lo(), 64)) && ge(&BigFloat::from_f64(i.hi(), 64), &hi)
    }
}

/// A random argument interval suited to `f`.
pub fn elem_argument<R: Rng>(rng: &mut R, f: ElemFn) -> Interval {
    let (lo, hi): (f64, f64) = match f {
        ElemFn::Sin | ElemFn::Cos => (-50.0, 50.0),
        ElemFn::Tan => (-1.5, 1.5),
        ElemFn::Exp => (-40.0, 40.0),
        ElemFn::Ln | ElemFn::Sqrt => (1e-6, 1e6),
        ElemFn::Arcsin => (-1.0, 1.0),
        ElemFn::Sqr => (-1e3, 1e3),
    };
    let a = rng.gen_range(lo..hi);
    let w = match rng.gen_range(0..3) {
        0 => 0.0,
        1 => rng.gen_range(0.0..1e-9),
        _ => rng.gen_range(0.0..(hi - lo) / 8.0),
    };
    Interval::new(a, (a + w).min(hi)).unwrap()
}

/// Points where periodic functions have their extremes, inside `i`.
fn critical_points(i: &Interval, period_quarter: f64) -> Vec<f64> {
    let k0 = (i.lo() / period_quarter).ceil() as i64;
    let k1 = (i.hi() / period_quarter).floor() as i64;
    (k0..=k1.min(k0 + 64))
        .map(|k| k as f64 * period_quarter)
        .filter(|x| i.contains(*x))
        .collect()
}

/// Violations found over `n` random elementary-function calls.
pub fn fuzz_elementary<R: Rng>(rng: &mut R, n: usize) -> usize {
    let fns = [
        ElemFn::Sin,
        ElemFn::Cos,
        ElemFn::Tan,
        ElemFn::Exp,
        ElemFn::Ln,
        ElemFn::Sqrt,
        ElemFn::Arcsin,
        ElemFn::Sqr,
    ];
    let mut oracle = BigOracle::new();
    let mut bad = 0;
    for k in 0..n {
        // Every tenth call goes to the 2 pi variants used by the maps.
        if k % 10 == 9 {
            let x = elem_argument(rng, ElemFn::Sin).scale(0.1);
            let cosine = k % 20 == 19;
            let r = if cosine { x.cos_2pi() } else { x.sin_2pi() };
            let mut pts = samples(&x, rng, 3);
            pts.extend(critical_points(&x, 0.25));
            if let Some(p) = pts.iter().find(|&&p| !oracle.encloses_2pi(&r, cosine, p)) {
                eprintln!("violation: trig 2pi (cos: {cosine}) of {x:?} = {r:?} misses {p:e}");
                bad += 1;
            }
            continue;
        }
        let f = fns[k % fns.len()];
        let x = elem_argument(rng, f);
        let Ok(r) = annular_cap::ivl::elem(f, x) else {
            continue;
        };
        let mut pts = samples(&x, rng, 3);
        if matches!(f, ElemFn::Sin | ElemFn::Cos) {
            pts.extend(critical_points(&x, std::f64::consts::FRAC_PI_2));
        }
        if let Some(p) = pts.iter().find(|&&p| !oracle.encloses(&r, f, p)) {
            eprintln!("violation: {f:?} of {x:?} = {r:?} misses {p:e}");
            bad += 1;
        }
    }
    bad
}

/// Exact rational `K` of the scalar worked example `x^2 - 4`, `C = 1/4`.
pub fn scalar_example_exact(lo: f64, hi: f64) -> (BigRational, BigRational) {
    let two = BigRational::from_integer(BigInt::from(2));
    let c = BigRational::new(BigInt::from(1), BigInt::from(4));
    let (xl, xh) = (rational(lo), rational(hi));
    // F(2) = 0, so K = 2 + (1 - c 2 [X]) ([X] - 2).
    let one = BigRational::from_integer(BigInt::from(1));
    let r_lo = &one - &c * &two * &xh;
    let r_hi = &one - &c * &two * &xl;
    let d_lo = &xl - &two;
    let d_hi = &xh - &two;
    let prods = [&r_lo * &d_lo, &r_lo * &d_hi, &r_hi * &d_lo, &r_hi * &d_hi];
    let min = prods.iter().min().unwrap().clone();
    let max = prods.iter().max().unwrap().clone();
    (&two + min, &two + max)
}
