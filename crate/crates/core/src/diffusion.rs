//! Certified unbounded diffusion for the conservative families: a float
//! search for an orbit from `y = -B` to above `y = B`, then a Krawczyk
//! validation of that orbit.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ivl::Interval;
use crate::krawczyk::{validate, Certificate, ShootingProblem, StartDirection, TargetLine};
use crate::maps::{diffusion_threshold, HChoice, MapSpec, Thresholds, VChoice};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CandidateOrbit {
    pub x_start: f64,
    pub m: usize,
    /// `points[0] = (x_start, -B)`, `points[m].y > B`, all in plain floats.
    pub points: Vec<[f64; 2]>,
    #[serde(rename = "B")]
    pub b: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchOptions {
    /// Number of uniformly spaced starting abscissae in `[0, 1)`.
    pub grid: usize,
    /// When set, only the neighbourhood of this abscissa is scanned.
    pub seed: Option<f64>,
    pub max_m: usize,
    /// Rescan shrinking windows around the best start found.
    pub refine: bool,
}

impl SearchOptions {
    pub fn vsf() -> Self {
        Self {
            grid: 10_000,
            seed: None,
            max_m: 50,
            refine: true,
        }
    }

    pub fn ntsf() -> Self {
        Self {
            grid: 10_000,
            seed: None,
            max_m: 300,
            refine: true,
        }
    }

    pub fn for_map(map: &MapSpec) -> Self {
        match map {
            MapSpec::Ntsf { .. } => Self::ntsf(),
            _ => Self::vsf(),
        }
    }

    pub fn with_seed(mut self, seed: Option<f64>) -> Self {
        self.seed = seed;
        self
    }
}

const WINDOW_POINTS: usize = 201;
const SEED_HALF_WIDTH: f64 = 5e-5;
/// Minimal-length orbits handed to the validator before giving up.
const CANDIDATE_TRIES: usize = 8;

/// Steps needed to climb from `(x, -b)` above `y = b`, with the final
/// height; `None` if that takes more than `limit` steps.
pub fn escape_time(map: &MapSpec, x: f64, b: f64, limit: usize) -> Option<(usize, f64)> {
    let mut p = [x, -b];
    for k in 1..=limit {
        p = map.eval_f64(p);
        if !p[1].is_finite() {
            return None;
        }
        if p[1] > b {
            return Some((k, p[1]));
        }
    }
    None
}

/// Float orbit of `p` of length `n + 1`.
pub fn orbit(map: &MapSpec, p: [f64; 2], n: usize) -> Vec<[f64; 2]> {
    let f = map.midpoint();
    let mut out = Vec::with_capacity(n + 1);
    out.push(p);
    for _ in 0..n {
        let last = *out.last().unwrap();
        out.push(f.eval_f64(last));
    }
    out
}

struct Search<'a> {
    map: &'a MapSpec,
    b: f64,
    max_m: usize,
    best_m: Option<usize>,
    /// `(final y, x)` of every start reaching the line in `best_m` steps.
    ties: Vec<(f64, f64)>,
}

impl Search<'_> {
    fn try_start(&mut self, x: f64) {
        let limit = self.best_m.unwrap_or(self.max_m);
        let Some((m, y)) = escape_time(self.map, x, self.b, limit) else {
            return;
        };
        if self.best_m != Some(m) {
            self.best_m = Some(m);
            self.ties.clear();
        }
        self.ties.push((y, x));
    }

    fn best_x(&self) -> Option<f64> {
        self.ties
            .iter()
            .max_by(|a, b| a.0.total_cmp(&b.0))
            .map(|t| t.1)
    }

    fn window(&mut self, centre: f64, half: f64) {
        for i in 0..WINDOW_POINTS {
            let t = i as f64 / (WINDOW_POINTS - 1) as f64;
            self.try_start(centre - half + 2.0 * half * t);
        }
    }
}

/// Float orbits from `y = -B` to above `y = B` with the smallest number of
/// steps, highest final point first. At most `count` are returned, spread
/// over all starts that achieve the minimum.
pub fn find_candidates(
    map: &MapSpec,
    b: f64,
    opts: &SearchOptions,
    count: usize,
) -> Vec<CandidateOrbit> {
    if !(b > 0.0) || opts.max_m == 0 || count == 0 {
        return Vec::new();
    }
    let f = map.midpoint();
    let mut s = Search {
        map: &f,
        b,
        max_m: opts.max_m,
        best_m: None,
        ties: Vec::new(),
    };
    let mut half = match opts.seed {
        Some(seed) => {
            s.try_start(seed);
            s.window(seed, SEED_HALF_WIDTH);
            SEED_HALF_WIDTH / 100.0
        }
        None => {
            for i in 0..opts.grid {
                s.try_start(i as f64 / opts.grid as f64);
            }
            0.5 / opts.grid.max(1) as f64
        }
    };
    if opts.refine {
        for _ in 0..2 {
            let Some(centre) = s.best_x() else { break };
            s.window(centre, half);
            half /= 100.0;
        }
    }
    let Some(m) = s.best_m else {
        return Vec::new();
    };
    let mut ties = s.ties;
    ties.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.total_cmp(&b.1)));
    ties.dedup_by(|a, b| a.1 == b.1);
    let picks: Vec<usize> = if ties.len() <= count {
        (0..ties.len()).collect()
    } else {
        let mut idx: Vec<usize> = (0..count).map(|i| i * ties.len() / count).collect();
        idx.dedup();
        idx
    };
    picks
        .into_iter()
        .map(|i| {
            let x = ties[i].1;
            CandidateOrbit {
                x_start: x,
                m,
                points: orbit(&f, [x, -b], m),
                b,
            }
        })
        .collect()
}

/// Smallest-`m` float orbit from `y = -B` to above `y = B`; ties go to
/// the orbit ending highest.
pub fn find_candidate(map: &MapSpec, b: f64, opts: &SearchOptions) -> Option<CandidateOrbit> {
    find_candidates(map, b, opts, 1).into_iter().next()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DiffusionStatus {
    Verified,
    NoCandidate,
    ValidationFailed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiffusionResult {
    pub status: DiffusionStatus,
    pub certificate: Option<Certificate>,
    pub m: Option<usize>,
    pub thresholds: Thresholds,
}

/// Validates the candidate with `v1 = (1, 0)`, then with `v1 = (0, 1)`.
pub fn validate_candidate(map: &MapSpec, cand: &CandidateOrbit) -> Result<Certificate> {
    let q0 = [Interval::point(cand.x_start), Interval::point(-cand.b)];
    let mut last = None;
    for v1 in [[1.0, 0.0], [0.0, 1.0]] {
        let prob = ShootingProblem::from_orbit(
            map.clone(),
            q0,
            StartDirection::Fixed { v: [1.0, 0.0] },
            0.0,
            &cand.points,
            v1,
            None,
        )?;
        let cert = validate(&prob, TargetLine::above(cand.b))?;
        if cert.verified {
            return Ok(cert);
        }
        last = Some(cert);
    }
    Ok(last.expect("two attempts were made"))
}

/// Full diffusion certification for a standard-family variation or the
/// non-twist standard family. `rho` is needed for non-twist variations.
pub fn validate_diffusion(
    map: &MapSpec,
    rho: Option<u32>,
    opts: &SearchOptions,
) -> Result<DiffusionResult> {
    let thresholds = diffusion_threshold(map, rho)?;
    thresholds.check_line(thresholds.b)?;
    let mut result = DiffusionResult {
        status: DiffusionStatus::NoCandidate,
        certificate: None,
        m: None,
        thresholds,
    };
    if let MapSpec::Ntsf { b, .. } = map {
        // One step moves y by at most |b|.
        let climb = 2.0 * thresholds.b;
        if b.mag() == 0.0 || climb / b.mag() > opts.max_m as f64 {
            return Ok(result);
        }
    }
    let cands = find_candidates(map, thresholds.b, opts, CANDIDATE_TRIES);
    let Some(first) = cands.first() else {
        return Ok(result);
    };
    result.m = Some(first.m);
    result.status = DiffusionStatus::ValidationFailed;
    if first.m < 2 {
        return Ok(result);
    }
    for cand in &cands {
        let cert = validate_candidate(map, cand)?;
        let verified = cert.verified;
        if verified || result.certificate.is_none() {
            result.certificate = Some(cert);
        }
        if verified {
            result.status = DiffusionStatus::Verified;
            break;
        }
    }
    Ok(result)
}

/// Writes `i, x_lo, x_hi, y_lo, y_hi` for every validated orbit point.
pub fn write_trajectory_csv<W: Write>(cert: &Certificate, mut out: W) -> Result<()> {
    let pts = cert
        .trajectory()
        .ok_or_else(|| Error::Precondition("certificate has no enclosure".into()))?;
    writeln!(out, "i,x_lo,x_hi,y_lo,y_hi")?;
    for (i, p) in pts.iter().enumerate() {
        writeln!(
            out,
            "{i},{},{},{},{}",
            p[0].lo(),
            p[0].hi(),
            p[1].lo(),
            p[1].hi()
        )?;
    }
    Ok(())
}

/// One of the tabulated standard-family variations.
#[derive(Clone, Debug, PartialEq)]
pub struct VsfConfig {
    pub h: HChoice,
    pub v: VChoice,
    pub c: Interval,
    /// Tabulated start abscissa on `y = -5`.
    pub seed: f64,
    pub expected_m: usize,
}

impl VsfConfig {
    pub fn map(&self) -> Result<MapSpec> {
        MapSpec::vsf(self.h, self.v, self.c)
    }

    /// Rotational difference supplied for the non-twist shear.
    pub fn rho(&self) -> Option<u32> {
        (!self.h.is_twist()).then_some(2)
    }
}

/// Decimal interval widened to the neighbouring doubles.
fn decimal_interval(lo: f64, hi: f64) -> Interval {
    Interval::raw(lo.next_down(), hi.next_up())
}

fn c_for(v: VChoice) -> Interval {
    match v {
        VChoice::Linear | VChoice::Tan => Interval::ZERO,
        VChoice::Quadratic => Interval::point(0.5),
        VChoice::Log => decimal_interval(-1.8714651070, -1.8713991910),
        VChoice::Exp => decimal_interval(-0.2660893818, -0.2660423737),
    }
}

/// The ten configurations: five twist (`h = id`), five non-twist (`h = sin`).
pub fn vsf_catalog() -> Vec<VsfConfig> {
    let twist = [0.2647, 0.3695, 0.5266, 0.4387, 0.3693];
    let twist_m = [11, 15, 12, 10, 12];
    let nontwist = [0.4454, 0.4185, 0.3332, 0.4614, 0.3046];
    let nontwist_m = [11, 14, 7, 9, 8];
    let mut out = Vec::new();
    for (h, seeds, ms) in [
        (HChoice::Identity, twist, twist_m),
        (HChoice::Sine, nontwist, nontwist_m),
    ] {
        for (i, v) in VChoice::ALL.into_iter().enumerate() {
            out.push(VsfConfig {
                h,
                v,
                c: c_for(v),
                seed: seeds[i],
                expected_m: ms[i],
            });
        }
    }
    out
}
