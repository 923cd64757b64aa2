//! Validation pipeline for a shooting problem and the certificate it emits.

use serde::{Deserialize, Serialize};

use super::operator::{inflate_candidate, krawczyk_test_sparse, KrawczykCheck};
use super::shooting::{Anchor, ShootingProblem, StartDirection};
use crate::error::Result;
use crate::ivl::{round, IVec, Interval, PointMat};
use crate::maps::{IPoint, MapSpec};

/// Horizontal line the endpoint must cross. `above` asks for `y > level`,
/// otherwise `y < level`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetLine {
    pub level: f64,
    pub above: bool,
}

impl TargetLine {
    pub fn above(level: f64) -> Self {
        Self { level, above: true }
    }

    pub fn below(level: f64) -> Self {
        Self {
            level,
            above: false,
        }
    }

    pub fn crossed_by(&self, y: Interval) -> bool {
        if self.above {
            y.lo() > self.level
        } else {
            y.hi() < self.level
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub map: MapSpec,
    pub m: usize,
    pub q0: IPoint,
    pub q1: IPoint,
    pub v0: StartDirection,
    pub v1: [f64; 2],
    pub z_domain: Option<Interval>,
    #[serde(default)]
    pub anchor: Anchor,
    pub candidate: Vec<f64>,
    /// Box `[X]` on which the Krawczyk test succeeded.
    pub x_enclosure: Option<IVec>,
    /// `K` computed on `x_enclosure`.
    pub k: Option<IVec>,
    pub h1_enclosure: Option<Interval>,
    /// `y`-range of `q1 + [h1] v1`.
    pub endpoint_enclosure: Option<Interval>,
    pub target: TargetLine,
    pub verified: bool,
}

impl Certificate {
    pub fn problem(&self) -> ShootingProblem {
        ShootingProblem {
            map: self.map.clone(),
            m: self.m,
            q0: self.q0,
            q1: self.q1,
            v0: self.v0.clone(),
            v1: self.v1,
            candidate: self.candidate.clone(),
            z_domain: self.z_domain,
            anchor: self.anchor,
        }
    }

    /// Enclosures of `p0, ..., pm` read off the validated box.
    pub fn trajectory(&self) -> Option<Vec<IPoint>> {
        let x = self.x_enclosure.as_ref()?;
        let prob = self.problem();
        let mut pts = vec![prob.start_point(x[0], prob.z_range())];
        pts.extend((1..self.m).map(|k| [x[2 * k], x[2 * k + 1]]));
        pts.push(prob.end_point(x[1]));
        Some(pts)
    }

    fn unverified(prob: &ShootingProblem, target: TargetLine) -> Self {
        Self {
            map: prob.map.clone(),
            m: prob.m,
            q0: prob.q0,
            q1: prob.q1,
            v0: prob.v0.clone(),
            v1: prob.v1,
            z_domain: prob.z_domain,
            anchor: prob.anchor,
            candidate: prob.candidate.clone(),
            x_enclosure: None,
            k: None,
            h1_enclosure: None,
            endpoint_enclosure: None,
            target,
            verified: false,
        }
    }
}

/// Fixed inflation radii tried before falling back to epsilon-inflation.
pub const INFLATION_LADDER: [f64; 4] = [1e-12, 1e-10, 1e-8, 1e-6];
const EPS_INFLATION_STEPS: usize = 15;

/// `y`-range of the endpoint `q1 + [h1] v1`.
pub fn endpoint_y(prob: &ShootingProblem, h1: Interval) -> Interval {
    prob.end_point(h1)[1]
}

fn run_test(prob: &ShootingProblem, x_box: &IVec, c: &PointMat) -> KrawczykCheck {
    let z = prob.z_range();
    krawczyk_test_sparse(
        prob.eval_f_centered(&prob.candidate, z),
        prob.eval_df(x_box, z),
        x_box,
        &prob.candidate,
        c,
    )
}

/// Next box from `K`: hull with the centre, widened by a tenth of the width.
fn widen(k: &IVec, centre: &[f64]) -> Option<IVec> {
    let mut out = Vec::with_capacity(k.len());
    for (ki, &ci) in k.iter().zip(centre) {
        let h = ki.hull(&Interval::point(ci));
        if !h.width().is_finite() || h.width() > 1.0 {
            return None;
        }
        let r = round::add_up(
            round::mul_up(0.1, h.width()),
            round::add_up(round::mul_up(1e-14, ci.abs()), 1e-300),
        );
        out.push(h.inflate(r));
    }
    Some(IVec::new(out))
}

/// Searches for a box on which the Krawczyk test succeeds.
pub fn find_box(prob: &ShootingProblem, c: &PointMat) -> Option<(IVec, IVec)> {
    let mut last = None;
    for r in INFLATION_LADDER {
        let x = inflate_candidate(&prob.candidate, r, r);
        let check = run_test(prob, &x, c);
        if check.verified {
            return check.k.map(|k| (x, k));
        }
        if r == INFLATION_LADDER[0] {
            last = check.k;
        }
    }
    let mut k = last?;
    for _ in 0..EPS_INFLATION_STEPS {
        let x = widen(&k, &prob.candidate)?;
        let check = run_test(prob, &x, c);
        match check.k {
            Some(next) if check.verified => return Some((x, next)),
            Some(next) => k = next,
            None => return None,
        }
    }
    None
}

/// Runs the Krawczyk validation and the endpoint check. Failure to verify
/// is reported through `verified = false`, not as an error.
pub fn validate(prob: &ShootingProblem, target: TargetLine) -> Result<Certificate> {
    let mut cert = Certificate::unverified(prob, target);
    let z_mid = prob.z_range().mid();
    let Ok(c) = prob.preconditioner(&prob.candidate, z_mid) else {
        return Ok(cert);
    };
    let Some((x, k)) = find_box(prob, &c) else {
        return Ok(cert);
    };
    let h1 = x[1];
    let y = endpoint_y(prob, h1);
    cert.verified = target.crossed_by(y);
    cert.x_enclosure = Some(x);
    cert.k = Some(k);
    cert.h1_enclosure = Some(h1);
    cert.endpoint_enclosure = Some(y);
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ntsf_problem(m: usize, v1: [f64; 2]) -> ShootingProblem {
        let map: MapSpec = "ntsf:a=0.6,b=0.3".parse().unwrap();
        let mut orbit = vec![[0.1, -0.2]];
        for _ in 0..m {
            let last = *orbit.last().unwrap();
            orbit.push(map.eval_f64(last));
        }
        ShootingProblem::from_orbit(
            map,
            [Interval::point(0.1), Interval::point(-0.2)],
            StartDirection::Fixed { v: [1.0, 0.0] },
            0.0,
            &orbit,
            v1,
            None,
        )
        .unwrap()
    }

    #[test]
    fn short_orbit_validates_on_the_first_rung() {
        let p = ntsf_problem(5, [1.0, 0.0]);
        let cert = validate(&p, TargetLine::above(-10.0)).unwrap();
        assert!(cert.verified);
        let x = cert.x_enclosure.unwrap();
        assert_eq!(x, inflate_candidate(&p.candidate, 1e-12, 1e-12));
        assert!(cert.k.unwrap().subset_interior(&x).unwrap());
        assert!(cert.endpoint_enclosure.unwrap().contains(p.q1[1].mid()));
    }

    #[test]
    fn unreachable_line_is_not_verified() {
        let p = ntsf_problem(5, [1.0, 0.0]);
        let cert = validate(&p, TargetLine::above(100.0)).unwrap();
        assert!(!cert.verified);
        // The zero was still enclosed.
        assert!(cert.x_enclosure.is_some());
    }

    #[test]
    fn broken_candidate_fails() {
        let mut p = ntsf_problem(5, [1.0, 0.0]);
        p.candidate[4] += 0.05;
        let cert = validate(&p, TargetLine::above(-10.0)).unwrap();
        assert!(!cert.verified);
    }

    #[test]
    fn certificate_serde_round_trip() {
        let p = ntsf_problem(4, [0.0, 1.0]);
        let cert = validate(&p, TargetLine::above(-10.0)).unwrap();
        let s = serde_json::to_string(&cert).unwrap();
        let back: Certificate = serde_json::from_str(&s).unwrap();
        assert_eq!(back, cert);
    }
}
