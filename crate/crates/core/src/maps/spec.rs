use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::riemann::riemann_enclosure;
use crate::error::{Error, Result};
use crate::ivl::Interval;

/// Horizontal shear `h` of a standard-family variation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HChoice {
    /// `h(y) = y`, the twist case.
    Identity,
    /// `h(y) = sin(2 pi y)`, a non-twist shear.
    Sine,
}

/// Vertical kick profile `v`, applied to `sin(2 pi u)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VChoice {
    /// `s + c`
    Linear,
    /// `s (1 - s) + c`
    Quadratic,
    /// `tan(s) + c`
    Tan,
    /// `3 ln(s + 2) + c`
    Log,
    /// `e^s - 1 + c`
    Exp,
}

/// A lifted annulus map together with its parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum MapSpec {
    /// `(x, y) -> (x + h(y), y + v(sin 2 pi (x + h(y))))`
    Vsf { h: HChoice, v: VChoice, c: Interval },
    /// Non-twist standard family with parameters `a > 0`, `b`.
    Ntsf { a: Interval, b: Interval },
    /// Dissipative standard family `(x + a y, b y + sin 2 pi (x + a y))`.
    DsfForward { a: Interval, b: Interval },
    /// Inverse of [`MapSpec::DsfForward`].
    DsfInverse { a: Interval, b: Interval },
}

/// Subdivisions used for the zero-mean check at construction.
const ZERO_MEAN_SUBDIVISIONS: usize = 512;

impl HChoice {
    pub fn name(self) -> &'static str {
        match self {
            HChoice::Identity => "id",
            HChoice::Sine => "sin",
        }
    }

    pub fn is_twist(self) -> bool {
        self == HChoice::Identity
    }
}

impl VChoice {
    pub const ALL: [VChoice; 5] = [
        VChoice::Linear,
        VChoice::Quadratic,
        VChoice::Tan,
        VChoice::Log,
        VChoice::Exp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            VChoice::Linear => "lin",
            VChoice::Quadratic => "quad",
            VChoice::Tan => "tan",
            VChoice::Log => "log",
            VChoice::Exp => "exp",
        }
    }

    /// `v(s) - c` in interval arithmetic.
    pub fn profile(self, s: Interval) -> Result<Interval> {
        Ok(match self {
            VChoice::Linear => s,
            VChoice::Quadratic => Interval::point(0.25) - (s - 0.5).sqr(),
            VChoice::Tan => s.tan()?,
            VChoice::Log => (s + 2.0).ln()?.scale(3.0),
            VChoice::Exp => s.exp() - 1.0,
        })
    }

    /// `v'(s)` in interval arithmetic.
    pub fn slope(self, s: Interval) -> Result<Interval> {
        Ok(match self {
            VChoice::Linear => Interval::ONE,
            VChoice::Quadratic => Interval::ONE - s.scale(2.0),
            VChoice::Tan => s.tan()?.sqr() + 1.0,
            VChoice::Log => Interval::point(3.0).div(s + 2.0)?,
            VChoice::Exp => s.exp(),
        })
    }

    pub fn profile_f64(self, s: f64) -> f64 {
        match self {
            VChoice::Linear => s,
            VChoice::Quadratic => s * (1.0 - s),
            VChoice::Tan => s.tan(),
            VChoice::Log => 3.0 * (s + 2.0).ln(),
            VChoice::Exp => s.exp() - 1.0,
        }
    }

    pub fn slope_f64(self, s: f64) -> f64 {
        match self {
            VChoice::Linear => 1.0,
            VChoice::Quadratic => 1.0 - 2.0 * s,
            VChoice::Tan => 1.0 + s.tan().powi(2),
            VChoice::Log => 3.0 / (s + 2.0),
            VChoice::Exp => s.exp(),
        }
    }
}

impl MapSpec {
    pub fn vsf(h: HChoice, v: VChoice, c: Interval) -> Result<Self> {
        Self::Vsf { h, v, c }.validated()
    }

    pub fn ntsf(a: f64, b: f64) -> Result<Self> {
        Self::Ntsf {
            a: checked_point(a)?,
            b: checked_point(b)?,
        }
        .validated()
    }

    pub fn dsf_forward(a: Interval, b: Interval) -> Result<Self> {
        Self::DsfForward { a, b }.validated()
    }

    pub fn dsf_inverse(a: Interval, b: Interval) -> Result<Self> {
        Self::DsfInverse { a, b }.validated()
    }

    /// Checks the family's parameter constraints.
    pub fn validated(self) -> Result<Self> {
        match &self {
            MapSpec::Vsf { v, c, .. } => {
                if !c.is_finite() {
                    return Err(Error::InvalidMap(format!("c = {c} is not finite")));
                }
                let mean = riemann_enclosure(*v, ZERO_MEAN_SUBDIVISIONS)? + *c;
                if !mean.contains_zero() {
                    return Err(Error::InvalidMap(format!(
                        "v(sin 2 pi x) with c = {c} does not have zero mean (enclosure {mean})"
                    )));
                }
            }
            MapSpec::Ntsf { a, b } => {
                if !(a.lo() > 0.0) || !a.is_finite() || !b.is_finite() {
                    return Err(Error::InvalidMap(format!(
                        "need a > 0, got a = {a}, b = {b}"
                    )));
                }
            }
            MapSpec::DsfForward { a, b } | MapSpec::DsfInverse { a, b } => {
                if !(a.lo() > 2.0) || !a.is_finite() || !(b.lo() > 0.0) || !(b.hi() < 1.0) {
                    return Err(Error::InvalidMap(format!(
                        "need a > 2 and 0 < b < 1, got a = {a}, b = {b}"
                    )));
                }
            }
        }
        Ok(self)
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            MapSpec::Vsf { .. } => "vsf",
            MapSpec::Ntsf { .. } => "ntsf",
            MapSpec::DsfForward { .. } => "dsf",
            MapSpec::DsfInverse { .. } => "dsf-inv",
        }
    }

    /// The same map with every parameter replaced by its midpoint.
    pub fn midpoint(&self) -> MapSpec {
        let m = |x: &Interval| Interval::point(x.mid());
        match self {
            MapSpec::Vsf { h, v, c } => MapSpec::Vsf {
                h: *h,
                v: *v,
                c: m(c),
            },
            MapSpec::Ntsf { a, b } => MapSpec::Ntsf { a: m(a), b: m(b) },
            MapSpec::DsfForward { a, b } => MapSpec::DsfForward { a: m(a), b: m(b) },
            MapSpec::DsfInverse { a, b } => MapSpec::DsfInverse { a: m(a), b: m(b) },
        }
    }
}

fn checked_point(x: f64) -> Result<Interval> {
    if !x.is_finite() {
        return Err(Error::InvalidMap(format!("parameter {x} is not finite")));
    }
    Ok(Interval::point(x))
}

/// Writes a point interval as a bare number, anything else as `[lo,hi]`.
fn fmt_param(f: &mut fmt::Formatter<'_>, x: &Interval) -> fmt::Result {
    if x.is_degenerate() {
        write!(f, "{:?}", x.lo())
    } else {
        write!(f, "[{:?},{:?}]", x.lo(), x.hi())
    }
}

impl fmt::Display for MapSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapSpec::Vsf { h, v, c } => {
                write!(
                    f,
                    "vsf:h={},v={},c=[{:?},{:?}]",
                    h.name(),
                    v.name(),
                    c.lo(),
                    c.hi()
                )
            }
            MapSpec::Ntsf { a, b }
            | MapSpec::DsfForward { a, b }
            | MapSpec::DsfInverse { a, b } => {
                write!(f, "{}:a=", self.family_name())?;
                fmt_param(f, a)?;
                f.write_str(",b=")?;
                fmt_param(f, b)
            }
        }
    }
}

/// Splits on commas that are not inside brackets.
fn split_params(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '[' => depth += 1,
            ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

/// Parses `1.5` or `[lo,hi]`.
pub fn parse_interval(text: &str) -> std::result::Result<Interval, String> {
    let t = text.trim();
    if let Some(inner) = t.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
        let (lo, hi) = inner.split_once(',').ok_or("expected [lo,hi]")?;
        let lo: f64 = lo.trim().parse().map_err(|e| format!("{e}"))?;
        let hi: f64 = hi.trim().parse().map_err(|e| format!("{e}"))?;
        Interval::new(lo, hi).map_err(|e| e.to_string())
    } else {
        let x: f64 = t.parse().map_err(|e| format!("{e}"))?;
        if !x.is_finite() {
            return Err(format!("{x} is not finite"));
        }
        Ok(Interval::point(x))
    }
}

impl FromStr for MapSpec {
    type Err = Error;

    fn from_str(input: &str) -> Result<Self> {
        let fail = |reason: String| Error::Parse {
            input: input.to_string(),
            reason,
        };
        let (family, rest) = input
            .split_once(':')
            .ok_or_else(|| fail("expected <family>:<params>".into()))?;
        let mut params = std::collections::BTreeMap::new();
        for item in split_params(rest) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| fail(format!("parameter {item:?} is not key=value")))?;
            if params.insert(k.trim(), v.trim()).is_some() {
                return Err(fail(format!("duplicate parameter {k}")));
            }
        }
        let mut take = |key: &str| {
            params
                .remove(key)
                .ok_or_else(|| fail(format!("missing parameter {key}")))
        };
        let spec = match family.trim() {
            "vsf" => {
                let h = match take("h")? {
                    "id" => HChoice::Identity,
                    "sin" => HChoice::Sine,
                    other => return Err(fail(format!("unknown h {other:?}"))),
                };
                let v = take("v")?;
                let v = VChoice::ALL
                    .into_iter()
                    .find(|c| c.name() == v)
                    .ok_or_else(|| fail(format!("unknown v {v:?}")))?;
                let c = parse_interval(take("c")?).map_err(fail)?;
                MapSpec::Vsf { h, v, c }
            }
            fam @ ("ntsf" | "dsf" | "dsf-inv") => {
                let a = parse_interval(take("a")?).map_err(fail)?;
                let b = parse_interval(take("b")?).map_err(fail)?;
                match fam {
                    "ntsf" => MapSpec::Ntsf { a, b },
                    "dsf" => MapSpec::DsfForward { a, b },
                    _ => MapSpec::DsfInverse { a, b },
                }
            }
            other => return Err(fail(format!("unknown family {other:?}"))),
        };
        if let Some(extra) = params.keys().next() {
            return Err(fail(format!("unexpected parameter {extra}")));
        }
        spec.validated()
    }
}

impl Serialize for MapSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for MapSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        for text in [
            "vsf:h=id,v=tan,c=[0.0,0.0]",
            "vsf:h=sin,v=log,c=[-1.871465107,-1.871399191]",
            "ntsf:a=0.5,b=0.25",
            "dsf:a=4.0,b=0.5",
            "dsf-inv:a=[4.0,4.05],b=[0.2,0.22]",
        ] {
            let spec: MapSpec = text.parse().unwrap();
            assert_eq!(spec.to_string(), text);
            assert_eq!(spec.to_string().parse::<MapSpec>().unwrap(), spec);
        }
    }

    #[test]
    fn short_forms_parse() {
        let spec: MapSpec = "dsf:a=4,b=0.5".parse().unwrap();
        assert_eq!(
            spec,
            MapSpec::DsfForward {
                a: Interval::point(4.0),
                b: Interval::point(0.5)
            }
        );
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!("ntsf:a=0,b=0.5".parse::<MapSpec>().is_err());
        assert!("dsf:a=1.5,b=0.5".parse::<MapSpec>().is_err());
        assert!("dsf:a=4,b=1".parse::<MapSpec>().is_err());
        assert!("ntsf:a=1".parse::<MapSpec>().is_err());
        assert!("ntsf:a=1,b=2,c=3".parse::<MapSpec>().is_err());
        assert!("henon:a=1,b=2".parse::<MapSpec>().is_err());
    }

    #[test]
    fn zero_mean_is_enforced() {
        assert!(MapSpec::vsf(HChoice::Identity, VChoice::Linear, Interval::ZERO).is_ok());
        assert!(MapSpec::vsf(HChoice::Identity, VChoice::Quadratic, Interval::point(0.5)).is_ok());
        assert!(MapSpec::vsf(HChoice::Identity, VChoice::Quadratic, Interval::ZERO).is_err());
        assert!(MapSpec::vsf(HChoice::Identity, VChoice::Log, Interval::ZERO).is_err());
    }
}
