//! Evaluation of the lifts and their Jacobians.
//!
//! Every family has an interval version (rigorous) and a plain `f64`
//! version used by the non-rigorous candidate search. The two are written
//! out separately on purpose: the float path never feeds a proof.

use super::spec::{HChoice, MapSpec};
use crate::error::{Error, Result};
use crate::ivl::{IMat, IVec, Interval, TWO_PI};

pub type IPoint = [Interval; 2];
pub type IJac = [[Interval; 2]; 2];

fn h_eval(h: HChoice, y: Interval) -> (Interval, Interval) {
    match h {
        HChoice::Identity => (y, Interval::ONE),
        HChoice::Sine => (y.sin_2pi(), TWO_PI * y.cos_2pi()),
    }
}

/// `sin(2 pi x)` and `cos(2 pi x)` with the integer part of `x` removed first.
#[inline]
pub fn sin_cos_2pi(x: f64) -> (f64, f64) {
    (std::f64::consts::TAU * (x - x.round())).sin_cos()
}

fn h_eval_f64(h: HChoice, y: f64) -> (f64, f64) {
    match h {
        HChoice::Identity => (y, 1.0),
        HChoice::Sine => {
            let (s, c) = sin_cos_2pi(y);
            (s, std::f64::consts::TAU * c)
        }
    }
}

impl MapSpec {
    /// Encloses the image of the box `p`.
    pub fn eval(&self, p: IPoint) -> Result<IPoint> {
        let [x, y] = p;
        Ok(match self {
            MapSpec::Vsf { h, v, c } => {
                let u = x + h_eval(*h, y).0;
                let s = u.sin_2pi();
                [u, y + v.profile(s)? + *c]
            }
            MapSpec::Ntsf { a, b } => {
                let yy = y - *b * x.sin_2pi();
                [x + *a * (Interval::ONE - yy.sqr()), yy]
            }
            MapSpec::DsfForward { a, b } => {
                let u = x + *a * y;
                [u, *b * y + u.sin_2pi()]
            }
            MapSpec::DsfInverse { a, b } => {
                let w = (y - x.sin_2pi()).div(*b)?;
                [x - *a * w, w]
            }
        })
    }

    /// Encloses the derivative at every point of `p`.
    pub fn jac(&self, p: IPoint) -> Result<IJac> {
        let [x, y] = p;
        Ok(match self {
            MapSpec::Vsf { h, v, .. } => {
                let (hy, dh) = h_eval(*h, y);
                let u = x + hy;
                let s = u.sin_2pi();
                let g = v.slope(s)? * TWO_PI * u.cos_2pi();
                [[Interval::ONE, dh], [g, Interval::ONE + g * dh]]
            }
            MapSpec::Ntsf { a, b } => {
                let yy = y - *b * x.sin_2pi();
                let dyy = -(*b * TWO_PI * x.cos_2pi());
                let t = (*a * yy).scale(-2.0);
                [[Interval::ONE + t * dyy, t], [dyy, Interval::ONE]]
            }
            MapSpec::DsfForward { a, b } => {
                let g = TWO_PI * (x + *a * y).cos_2pi();
                [[Interval::ONE, *a], [g, *b + g * *a]]
            }
            MapSpec::DsfInverse { a, b } => {
                let rb = b.recip()?;
                let dw = -(TWO_PI * x.cos_2pi() * rb);
                [[Interval::ONE - *a * dw, -(*a * rb)], [dw, rb]]
            }
        })
    }

    /// Parameters in a fixed order: `c` for the variations, `a, b` otherwise.
    pub fn params(&self) -> Vec<Interval> {
        match self {
            MapSpec::Vsf { c, .. } => vec![*c],
            MapSpec::Ntsf { a, b }
            | MapSpec::DsfForward { a, b }
            | MapSpec::DsfInverse { a, b } => {
                vec![*a, *b]
            }
        }
    }

    /// Same family with the parameters of [`MapSpec::params`] replaced.
    pub fn with_params(&self, p: &[Interval]) -> Self {
        match self {
            MapSpec::Vsf { h, v, .. } => MapSpec::Vsf {
                h: *h,
                v: *v,
                c: p[0],
            },
            MapSpec::Ntsf { .. } => MapSpec::Ntsf { a: p[0], b: p[1] },
            MapSpec::DsfForward { .. } => MapSpec::DsfForward { a: p[0], b: p[1] },
            MapSpec::DsfInverse { .. } => MapSpec::DsfInverse { a: p[0], b: p[1] },
        }
    }

    /// Encloses the derivative of the image with respect to each parameter
    /// of [`MapSpec::params`], over the box `p` and the parameter ranges.
    pub fn param_jac(&self, p: IPoint) -> Result<Vec<IPoint>> {
        let [x, y] = p;
        Ok(match self {
            MapSpec::Vsf { .. } => vec![[Interval::ZERO, Interval::ONE]],
            MapSpec::Ntsf { a, b } => {
                let s = x.sin_2pi();
                let yy = y - *b * s;
                vec![
                    [Interval::ONE - yy.sqr(), Interval::ZERO],
                    [(*a * yy * s).scale(2.0), -s],
                ]
            }
            MapSpec::DsfForward { a, .. } => {
                let g = TWO_PI * (x + *a * y).cos_2pi();
                vec![[y, g * y], [Interval::ZERO, y]]
            }
            MapSpec::DsfInverse { a, b } => {
                let w = (y - x.sin_2pi()).div(*b)?;
                let wb = -w.div(*b)?;
                vec![[-w, Interval::ZERO], [-(*a * wb), wb]]
            }
        })
    }

    /// Non-rigorous image of a point, evaluated at the parameter midpoints.
    pub fn eval_f64(&self, p: [f64; 2]) -> [f64; 2] {
        let [x, y] = p;
        match self {
            MapSpec::Vsf { h, v, c } => {
                let u = x + h_eval_f64(*h, y).0;
                [u, y + v.profile_f64(sin_cos_2pi(u).0) + c.mid()]
            }
            MapSpec::Ntsf { a, b } => {
                let yy = y - b.mid() * sin_cos_2pi(x).0;
                [x + a.mid() * (1.0 - yy * yy), yy]
            }
            MapSpec::DsfForward { a, b } => {
                let u = x + a.mid() * y;
                [u, b.mid() * y + sin_cos_2pi(u).0]
            }
            MapSpec::DsfInverse { a, b } => {
                let w = (y - sin_cos_2pi(x).0) / b.mid();
                [x - a.mid() * w, w]
            }
        }
    }

    pub fn jac_f64(&self, p: [f64; 2]) -> [[f64; 2]; 2] {
        use std::f64::consts::TAU;
        let [x, y] = p;
        match self {
            MapSpec::Vsf { h, v, .. } => {
                let (hy, dh) = h_eval_f64(*h, y);
                let u = x + hy;
                let (s, c) = sin_cos_2pi(u);
                let g = v.slope_f64(s) * TAU * c;
                [[1.0, dh], [g, 1.0 + g * dh]]
            }
            MapSpec::Ntsf { a, b } => {
                let (s, c) = sin_cos_2pi(x);
                let yy = y - b.mid() * s;
                let dyy = -b.mid() * TAU * c;
                let t = -2.0 * a.mid() * yy;
                [[1.0 + t * dyy, t], [dyy, 1.0]]
            }
            MapSpec::DsfForward { a, b } => {
                let g = TAU * sin_cos_2pi(x + a.mid() * y).1;
                [[1.0, a.mid()], [g, b.mid() + g * a.mid()]]
            }
            MapSpec::DsfInverse { a, b } => {
                let dw = -TAU * sin_cos_2pi(x).1 / b.mid();
                [
                    [1.0 - a.mid() * dw, -a.mid() / b.mid()],
                    [dw, 1.0 / b.mid()],
                ]
            }
        }
    }
}

fn as_point(p: &IVec) -> Result<IPoint> {
    if p.len() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: p.len(),
        });
    }
    Ok([p[0], p[1]])
}

/// `eval_map(spec, p)`: enclosure of the image of the box `p`.
pub fn eval_map(spec: &MapSpec, p: &IVec) -> Result<IVec> {
    Ok(IVec::new(spec.eval(as_point(p)?)?.to_vec()))
}

/// `jacobian(spec, p)`: enclosure of the derivative over `p`.
pub fn jacobian(spec: &MapSpec, p: &IVec) -> Result<IMat> {
    let j = spec.jac(as_point(p)?)?;
    IMat::from_rows(vec![j[0].to_vec(), j[1].to_vec()])
}

pub fn det(j: &IJac) -> Interval {
    j[0][0] * j[1][1] - j[0][1] * j[1][0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::spec::VChoice;

    fn pt(x: f64, y: f64) -> IPoint {
        [Interval::point(x), Interval::point(y)]
    }

    #[test]
    fn vsf_origin_is_fixed() {
        let f = MapSpec::vsf(HChoice::Identity, VChoice::Linear, Interval::ZERO).unwrap();
        let [x, y] = f.eval(pt(0.0, 0.0)).unwrap();
        assert!(x.contains(0.0) && y.contains(0.0));
    }

    #[test]
    fn ntsf_fixes_unit_height_when_unperturbed() {
        let f = MapSpec::ntsf(1.0, 0.0).unwrap();
        let [x, y] = f.eval(pt(0.0, 1.0)).unwrap();
        assert!(x.contains(0.0) && y.contains(1.0));
    }

    #[test]
    fn dsf_round_trip() {
        let (a, b) = (Interval::point(4.0), Interval::point(0.5));
        let fwd = MapSpec::dsf_forward(a, b).unwrap();
        let inv = MapSpec::dsf_inverse(a, b).unwrap();
        let back = fwd.eval(inv.eval(pt(0.3, 0.7)).unwrap()).unwrap();
        assert!(back[0].contains(0.3) && back[1].contains(0.7));
    }

    #[test]
    fn vsf_linear_jacobian_at_origin() {
        let f = MapSpec::vsf(HChoice::Identity, VChoice::Linear, Interval::ZERO).unwrap();
        let j = f.jac(pt(0.0, 0.0)).unwrap();
        let tau = std::f64::consts::TAU;
        assert!(j[0][0].contains(1.0) && j[0][1].contains(1.0));
        assert!(j[1][0].contains(tau) && j[1][1].contains(1.0 + tau));
    }

    #[test]
    fn dsf_forward_determinant_is_b() {
        let f = MapSpec::dsf_forward(Interval::point(4.0), Interval::point(0.5)).unwrap();
        for (x, y) in [(0.1, 0.2), (0.7, -3.0), (12.3, 0.0)] {
            assert!(det(&f.jac(pt(x, y)).unwrap()).contains(0.5));
        }
    }

    #[test]
    fn float_and_interval_paths_agree() {
        let f: MapSpec = "ntsf:a=0.7,b=0.4".parse().unwrap();
        let p = [0.123, -0.456];
        let e = f.eval(pt(p[0], p[1])).unwrap();
        let q = f.eval_f64(p);
        for i in 0..2 {
            assert!((e[i].mid() - q[i]).abs() < 1e-13);
            assert!(e[i].width() < 1e-13);
        }
    }

    #[test]
    fn parameter_derivatives_match_differences() {
        let specs: Vec<MapSpec> = [
            "vsf:h=sin,v=exp,c=[-0.27,-0.26]",
            "ntsf:a=0.6,b=0.3",
            "dsf:a=4.5,b=0.3",
            "dsf-inv:a=4.5,b=0.3",
        ]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect();
        let p = [0.137, -0.41];
        let eps = 1e-7;
        for spec in specs {
            let params = spec.params();
            let d = spec
                .param_jac([Interval::point(p[0]), Interval::point(p[1])])
                .unwrap();
            for j in 0..params.len() {
                let shifted = |delta: f64| {
                    let mut q: Vec<Interval> =
                        params.iter().map(|v| Interval::point(v.mid())).collect();
                    q[j] = Interval::point(q[j].mid() + delta);
                    spec.with_params(&q).eval_f64(p)
                };
                let (hi, lo) = (shifted(eps), shifted(-eps));
                for r in 0..2 {
                    let fd = (hi[r] - lo[r]) / (2.0 * eps);
                    assert!(
                        (d[j][r].mid() - fd).abs() < 1e-6,
                        "{spec} param {j} row {r}"
                    );
                }
            }
        }
    }
}
