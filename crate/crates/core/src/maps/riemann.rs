//! Interval Riemann sums for the zero-mean constant of a kick profile.

use super::spec::VChoice;
use crate::error::{Error, Result};
use crate::ivl::Interval;

/// Encloses `int_0^1 (v(sin 2 pi x) - c) dx` by summing
/// `[w([x_{i-1}, x_i])] (x_i - x_{i-1})` over `k` equal cells.
pub fn riemann_enclosure(v: VChoice, k: usize) -> Result<Interval> {
    if k == 0 {
        return Err(Error::Precondition("riemann_enclosure needs k >= 1".into()));
    }
    let kk = Interval::point(k as f64);
    let node = |i: usize| Interval::point(i as f64).div(kk);
    let step = Interval::ONE.div(kk)?;
    let mut sum = Interval::ZERO;
    let mut left = node(0)?;
    for i in 1..=k {
        let right = node(i)?;
        let cell = left.hull(&right);
        sum = sum + v.profile(cell.sin_2pi())? * step;
        left = right;
    }
    Ok(sum)
}

/// Enclosure of the `c` that makes `v(sin 2 pi x)` zero-mean, refined by
/// doubling the number of cells until its width is at most `max_width`.
/// Returns the enclosure and the cell count used.
pub fn zero_mean_constant(v: VChoice, max_width: f64) -> Result<(Interval, usize)> {
    let mut k = 1024usize;
    loop {
        let c = -riemann_enclosure(v, k)?;
        if c.width() <= max_width || k >= 1 << 24 {
            return Ok((c, k));
        }
        k *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sine_integrates_to_zero() {
        let e = riemann_enclosure(VChoice::Linear, 1000).unwrap();
        assert!(e.contains_zero());
        assert!(e.width() <= 0.05);
    }

    #[test]
    fn quadratic_profile_has_mean_minus_half() {
        let e = riemann_enclosure(VChoice::Quadratic, 4096).unwrap();
        assert!(e.contains(-0.5));
    }

    #[test]
    fn zero_cells_rejected() {
        assert!(riemann_enclosure(VChoice::Tan, 0).is_err());
    }
}
