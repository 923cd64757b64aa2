//! Diffusion thresholds and the shooting lines derived from them.

use serde::{Deserialize, Serialize};

use super::spec::MapSpec;
use crate::error::{Error, Result};
use crate::ivl::{round, Interval};

/// Shooting line used for every standard-family variation.
pub const VSF_LINE: f64 = 5.0;
/// Margin added above `M_{a,b}` for the non-twist standard family.
pub const NTSF_LINE_MARGIN: f64 = 1e-3;
/// Width at which the branch-and-bound for `N(f)` stops bisecting.
const BNB_WIDTH: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Maximal vertical displacement `N(f)`.
    #[serde(rename = "N")]
    pub n: Interval,
    /// Diffusion threshold `M`.
    #[serde(rename = "M")]
    pub m: Interval,
    /// Shooting line level `B`; orbits run from `y = -B` to `y > B`.
    #[serde(rename = "B")]
    pub b: f64,
}

/// Rigorous enclosure of `N(f)`.
///
/// For the standard-family variations `N(f) = max |v(s)|` over
/// `s in [-1, 1]`, found by interval branch and bound; for the non-twist
/// standard family it is `|b|`.
pub fn vertical_bound(spec: &MapSpec) -> Result<Interval> {
    match spec {
        MapSpec::Vsf { v, c, .. } => {
            let f = |s: Interval| -> Result<Interval> { Ok((v.profile(s)? + *c).abs()) };
            let mut lower = [-1.0, 0.0, 1.0]
                .into_iter()
                .map(|s| f(Interval::point(s)).map(|e| e.lo()))
                .try_fold(0.0f64, |m, e| e.map(|e| m.max(e)))?;
            let mut upper = lower;
            let mut stack = vec![Interval::raw(-1.0, 1.0)];
            while let Some(cell) = stack.pop() {
                let e = f(cell)?;
                if e.hi() <= lower {
                    continue;
                }
                if cell.width() <= BNB_WIDTH {
                    upper = upper.max(e.hi());
                    continue;
                }
                let m = cell.mid();
                lower = lower.max(f(Interval::point(m))?.lo());
                stack.push(Interval::raw(cell.lo(), m));
                stack.push(Interval::raw(m, cell.hi()));
            }
            Ok(Interval::raw(lower, upper.max(lower)))
        }
        MapSpec::Ntsf { b, .. } => Ok(b.abs()),
        _ => Err(Error::Unsupported("vertical_bound")),
    }
}

/// `min(3N + 2, N + 4)` for twist maps.
pub fn twist_threshold(n: Interval) -> Interval {
    (n.scale(3.0) + 2.0).min(n + 4.0)
}

/// `M_rho` for maps with two fixed points of rotational difference `rho`:
/// `6N + 2`, `4N + 2`, then `2N + 2` for `rho >= 3`.
pub fn nontwist_threshold(n: Interval, rho: u32) -> Result<Interval> {
    let k = match rho {
        0 => {
            return Err(Error::Precondition(
                "rotational difference must be >= 1".into(),
            ))
        }
        1 => 6.0,
        2 => 4.0,
        _ => 2.0,
    };
    Ok(n.scale(k) + 2.0)
}

/// `M_{a,b} = max{2 sqrt(1 + 3/a) + |b|, 2/(a|b|)}`; unbounded when `b` may vanish.
pub fn ntsf_threshold(a: Interval, b: Interval) -> Result<Interval> {
    let first = (Interval::point(3.0).div(a)? + 1.0).sqrt()?.scale(2.0) + b.abs();
    let ab = a * b.abs();
    let second = if ab.contains_zero() {
        Interval::raw(0.0, f64::INFINITY)
    } else {
        Interval::point(2.0).div(ab)?
    };
    Ok(first.max(second))
}

/// Smallest half-integer not below `x`.
fn half_integer_ceil(x: f64) -> f64 {
    (2.0 * x).ceil() / 2.0
}

/// Computes `N`, `M` and the shooting line for a conservative map.
///
/// For the variations the line is the fixed `y = 5` used throughout the
/// experiments, raised to the smallest half-integer above `M/2` if the
/// computed threshold demands it. `rho` is required for non-twist shears.
pub fn diffusion_threshold(spec: &MapSpec, rho: Option<u32>) -> Result<Thresholds> {
    let n = vertical_bound(spec)?;
    match spec {
        MapSpec::Vsf { h, .. } => {
            let m = if h.is_twist() {
                twist_threshold(n)
            } else {
                nontwist_threshold(n, rho.ok_or(Error::MissingRho)?)?
            };
            let b = VSF_LINE.max(half_integer_ceil(m.hi() / 2.0));
            Ok(Thresholds { n, m, b })
        }
        MapSpec::Ntsf { a, b } => {
            let m = ntsf_threshold(*a, *b)?;
            Ok(Thresholds {
                n,
                m,
                b: round::add_up(m.hi(), NTSF_LINE_MARGIN),
            })
        }
        _ => Err(Error::Unsupported("diffusion_threshold")),
    }
}

impl Thresholds {
    /// Refuses a shooting line too low for the diffusion theorem: the climb
    /// from `-line` to `line` must cover `M`.
    pub fn check_line(&self, line: f64) -> Result<()> {
        let half = round::mul_up(self.m.hi(), 0.5);
        if line < half {
            return Err(Error::LineBelowThreshold {
                line,
                half_threshold: half,
            });
        }
        Ok(())
    }
}

/// `B = 1/(1 - b)` rounded up: lines `y = +-B` are mapped inside themselves
/// by the forward dissipative map.
pub fn dsf_b(b: f64) -> f64 {
    round::div_up(1.0, round::sub_down(1.0, b))
}
