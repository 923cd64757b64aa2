//! Rotating fixed points of the inverse dissipative map.

use serde::{Deserialize, Serialize};

use super::eval::IPoint;
use super::spec::MapSpec;
use crate::error::{Error, Result};
use crate::ivl::{round, Interval, TWO_PI};

/// Points `p_plus`, `p_minus` with `f(p_plus) = p_plus + (kappa, 0)` and
/// `f(p_minus) = p_minus - (kappa, 0)` for the inverse dissipative map.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixedPointPair {
    pub kappa: i64,
    pub p_plus: IPoint,
    pub p_minus: IPoint,
}

/// Encloses `x = arcsin(kappa (b - 1) / a) / (2 pi)`, `y = -kappa / a`.
pub fn rotating_point(a: Interval, b: Interval, kappa: i64) -> Result<IPoint> {
    let k = Interval::point(kappa as f64);
    let t = (k * (b - 1.0)).div(a)?;
    if !(t.mag() < 1.0) {
        return Err(Error::NoFixedPoint { kappa });
    }
    let x = t.asin()?.div(TWO_PI)?;
    let y = -k.div(a)?;
    Ok([x, y])
}

/// Derivatives of [`rotating_point`] with respect to `a` and `b`.
pub fn rotating_point_slope(a: Interval, b: Interval, kappa: i64) -> Result<[IPoint; 2]> {
    let k = Interval::point(kappa as f64);
    let t = (k * (b - 1.0)).div(a)?;
    if !(t.mag() < 1.0) {
        return Err(Error::NoFixedPoint { kappa });
    }
    let root = (Interval::ONE - t.sqr()).sqrt()?;
    let denom = TWO_PI * a * root;
    let dx_da = -t.div(denom)?;
    let dx_db = k.div(denom)?;
    let dy_da = k.div(a.sqr())?;
    Ok([[dx_da, dy_da], [dx_db, Interval::ZERO]])
}

pub fn dsf_fixed_pair(a: Interval, b: Interval, kappa: i64) -> Result<FixedPointPair> {
    if kappa == 0 {
        return Err(Error::NoFixedPoint { kappa });
    }
    let f = MapSpec::dsf_inverse(a, b)?;
    let p_plus = rotating_point(a, b, kappa)?;
    let p_minus = rotating_point(a, b, -kappa)?;
    for (p, shift) in [(p_plus, kappa), (p_minus, -kappa)] {
        let q = f.eval(p)?;
        let dx = q[0] - p[0];
        let dy = q[1] - p[1];
        if !dx.contains(shift as f64) || !dy.contains_zero() {
            return Err(Error::NoFixedPoint { kappa });
        }
    }
    Ok(FixedPointPair {
        kappa,
        p_plus,
        p_minus,
    })
}

/// Length of the box chain, `[34 / (2 kappa)]` with `[r] = floor(r) + 1`.
pub fn box_chain_length(kappa: i64) -> i64 {
    34 / (2 * kappa.abs()) + 1
}

/// Rotation numbers tried for a parameter box: `1 ..= k` with `k` the
/// largest integer strictly below `a / (1 - b)` over the whole box.
///
/// A relative margin of `1e-9` keeps exact integer ratios (which rounding
/// may push just above the integer) out of the range; those sit on the
/// fold where the fixed point is not hyperbolic.
pub fn kappa_range(a: Interval, b: Interval) -> std::ops::RangeInclusive<i64> {
    let ratio = round::div_down(a.lo(), round::sub_up(1.0, b.lo()));
    let top = (ratio * (1.0 - 1e-9)).ceil() as i64 - 1;
    1..=top.max(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn existence_condition() {
        let r = dsf_fixed_pair(Interval::point(4.0), Interval::point(0.5), 9);
        assert!(matches!(r, Err(Error::NoFixedPoint { kappa: 9 })));
    }

    #[test]
    fn first_pair_for_a4_b_half() {
        let pair = dsf_fixed_pair(Interval::point(4.0), Interval::point(0.5), 1).unwrap();
        assert!(pair.p_plus[1].contains(-0.25));
        assert!(pair.p_minus[1].contains(0.25));
        assert!((pair.p_plus[0].mid() - (-0.125f64).asin() / std::f64::consts::TAU).abs() < 1e-15);
        assert!(pair.p_plus[0].width() < 1e-15);
    }

    #[test]
    fn chain_lengths() {
        assert_eq!(box_chain_length(1), 18);
        assert_eq!(box_chain_length(2), 9);
        assert_eq!(box_chain_length(3), 6);
    }

    #[test]
    fn kappa_ladder() {
        assert_eq!(
            kappa_range(Interval::point(10.0), Interval::point(0.8)),
            1..=49
        );
        assert_eq!(
            kappa_range(Interval::point(4.0), Interval::point(0.5)),
            1..=7
        );
    }

    #[test]
    fn slope_matches_differences() {
        let (a, b, eps) = (4.5, 0.3, 1e-7);
        let at = |a: f64, b: f64| {
            let p = rotating_point(Interval::point(a), Interval::point(b), 2).unwrap();
            [p[0].mid(), p[1].mid()]
        };
        let d = rotating_point_slope(Interval::point(a), Interval::point(b), 2).unwrap();
        let fd = [
            [
                (at(a + eps, b)[0] - at(a - eps, b)[0]) / (2.0 * eps),
                (at(a + eps, b)[1] - at(a - eps, b)[1]) / (2.0 * eps),
            ],
            [
                (at(a, b + eps)[0] - at(a, b - eps)[0]) / (2.0 * eps),
                (at(a, b + eps)[1] - at(a, b - eps)[1]) / (2.0 * eps),
            ],
        ];
        for j in 0..2 {
            for r in 0..2 {
                assert!((d[j][r].mid() - fd[j][r]).abs() < 1e-6);
            }
        }
    }
}
