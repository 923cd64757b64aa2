//! Rotational horseshoes for the dissipative standard family.
//!
//! Everything runs on the inverse map. For a rotation number `kappa` the
//! two rotating fixed points get local frames whose first column is the
//! unstable direction. A cone condition on the window `U~` around each
//! fixed point lets arbitrarily short segments reach a curve `v~`. Four
//! parameter-dependent shooting problems then carry that curve above
//! `y = B` and below `y = -B`.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ivl::{inverse_2x2, IMat, Interval, PointMat};
use crate::krawczyk::{validate, Anchor, Certificate, ShootingProblem, StartDirection, TargetLine};
use crate::maps::{
    box_chain_length, dsf_b, dsf_fixed_pair, kappa_range, FixedPointPair, IJac, IPoint, MapSpec,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalFrame {
    /// Columns: unstable, then stable eigenvector.
    pub a: [[f64; 2]; 2],
    /// Rigorous enclosure of `A^-1`.
    pub a_inv: IJac,
    /// Unstable and stable eigenvalue (float estimates).
    pub eigenvalues: [f64; 2],
    #[serde(rename = "L")]
    pub l: f64,
    pub alpha: f64,
    pub beta: f64,
}

fn norm(v: [f64; 2]) -> f64 {
    v[0].hypot(v[1])
}

fn eigenvector(j: [[f64; 2]; 2], lambda: f64) -> [f64; 2] {
    let c1 = [j[0][1], lambda - j[0][0]];
    let c2 = [lambda - j[1][1], j[1][0]];
    let v = if norm(c1) >= norm(c2) { c1 } else { c2 };
    let n = norm(v);
    let sign = if v[0].abs() >= v[1].abs() {
        v[0].signum()
    } else {
        v[1].signum()
    };
    [sign * v[0] / n, sign * v[1] / n]
}

fn point_jac(a: [[f64; 2]; 2]) -> IJac {
    a.map(|row| row.map(Interval::point))
}

fn mat_mul(a: &IJac, b: &IJac) -> IJac {
    let mut out = [[Interval::ZERO; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, e) in row.iter_mut().enumerate() {
            *e = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn mat_vec(a: &IJac, v: IPoint) -> IPoint {
    [
        a[0][0] * v[0] + a[0][1] * v[1],
        a[1][0] * v[0] + a[1][1] * v[1],
    ]
}

/// Frame from a Jacobian estimate.
pub fn frame_from_jacobian(j: [[f64; 2]; 2], l: f64, alpha: f64, beta: f64) -> Result<LocalFrame> {
    if !(l > 0.0 && alpha > 0.0 && beta > l * alpha) {
        return Err(Error::Precondition(format!(
            "need L > 0, alpha > 0 and beta / alpha > L, got L = {l}, alpha = {alpha}, beta = {beta}"
        )));
    }
    let tr = j[0][0] + j[1][1];
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let disc = 0.25 * tr * tr - det;
    if disc < 0.0 {
        return Err(Error::ComplexEigenvalues);
    }
    // The larger root directly, the smaller through the determinant.
    let big = 0.5 * tr + tr.signum() * disc.sqrt();
    let (lu, ls) = if big == 0.0 {
        (0.0, 0.0)
    } else {
        (big, det / big)
    };
    if !(lu.abs() > 1.0 && ls.abs() < 1.0) {
        return Err(Error::NotHyperbolic(lu, ls));
    }
    let u = eigenvector(j, lu);
    let s = eigenvector(j, ls);
    let a = [[u[0], s[0]], [u[1], s[1]]];
    if (u[0] * s[1] - s[0] * u[1]).abs() < 1e-8 {
        return Err(Error::NearSingularFrame);
    }
    let inv = inverse_2x2(&IMat::from_points(&PointMat::from_rows(&[&a[0], &a[1]])?))
        .map_err(|_| Error::NearSingularFrame)?;
    let a_inv = [[inv[(0, 0)], inv[(0, 1)]], [inv[(1, 0)], inv[(1, 1)]]];
    Ok(LocalFrame {
        a,
        a_inv,
        eigenvalues: [lu, ls],
        l,
        alpha,
        beta,
    })
}

/// Frame at a fixed point from the Jacobian of the midpoint map.
pub fn local_frame(map: &MapSpec, fp: IPoint, l: f64, alpha: f64, beta: f64) -> Result<LocalFrame> {
    let j = map.midpoint().jac_f64([fp[0].mid(), fp[1].mid()]);
    frame_from_jacobian(j, l, alpha, beta)
}

impl LocalFrame {
    /// `U~ = [-alpha, alpha] x [-beta, beta]`.
    pub fn window(&self) -> IPoint {
        [
            Interval::raw(-self.alpha, self.alpha),
            Interval::raw(-self.beta, self.beta),
        ]
    }

    pub fn a_ivl(&self) -> IJac {
        point_jac(self.a)
    }

    /// `A p`.
    pub fn to_global(&self, p: IPoint) -> IPoint {
        mat_vec(&self.a_ivl(), p)
    }
}

/// `f_i(p) = A^-1 (f(fp + A p) - fp - (shift, 0))`; the shift undoes the
/// rotation so that the origin is fixed in the lift.
pub fn local_map(
    map: &MapSpec,
    fp: IPoint,
    frame: &LocalFrame,
    shift: i64,
    p: IPoint,
) -> Result<IPoint> {
    let ap = frame.to_global(p);
    let q = map.eval([fp[0] + ap[0], fp[1] + ap[1]])?;
    let d = [q[0] - fp[0] - shift as f64, q[1] - fp[1]];
    Ok(mat_vec(&frame.a_inv, d))
}

/// `[Df_i(U~)] = A^-1 [Df(fp + A U~)] A`.
pub fn local_derivative(map: &MapSpec, fp: IPoint, frame: &LocalFrame) -> Result<IJac> {
    let w = frame.to_global(frame.window());
    let j = map.jac([fp[0] + w[0], fp[1] + w[1]])?;
    Ok(mat_mul(&mat_mul(&frame.a_inv, &j), &frame.a_ivl()))
}

/// `|pi_x C(1, y)| > 1` and `|pi_y C(1, y)| <= L` for all `|y| <= L` and
/// every `C` in the enclosure.
pub fn cone_condition(c: &IJac, l: f64) -> bool {
    let y = Interval::raw(-l, l);
    let px = c[0][0] + c[0][1] * y;
    let py = c[1][0] + c[1][1] * y;
    px.mig() > 1.0 && py.mag() <= l
}

pub fn cone_check(map: &MapSpec, fp: IPoint, frame: &LocalFrame) -> bool {
    local_derivative(map, fp, frame).is_ok_and(|c| cone_condition(&c, frame.l))
}

/// `A U~` fits in the box of width 1 and height 2 centred at the fixed point.
pub fn geometry_check(frame: &LocalFrame) -> bool {
    let w = frame.to_global(frame.window());
    w[0].subset(&Interval::raw(-0.5, 0.5)) && w[1].subset(&Interval::raw(-1.0, 1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FixedPoint {
    Plus,
    Minus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Up,
    Down,
}

/// The four branches in the order of conditions (I), (III), (V), (VII).
pub const BRANCHES: [(FixedPoint, Direction); 4] = [
    (FixedPoint::Plus, Direction::Up),
    (FixedPoint::Minus, Direction::Up),
    (FixedPoint::Plus, Direction::Down),
    (FixedPoint::Minus, Direction::Down),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailReason {
    NoFixedPoint,
    Frame,
    Cone,
    NoCandidate,
    Krawczyk,
    Endpoint,
    SegmentOutsideWindow,
    DegenerateSegment,
    TimedOut,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DsfCase {
    pub a: Interval,
    pub b: Interval,
    pub kappa: i64,
    pub pair: FixedPointPair,
    /// Box-chain length.
    #[serde(rename = "N")]
    pub n: i64,
    /// Frames at `p_plus` and `p_minus`.
    pub frames: [LocalFrame; 2],
    #[serde(rename = "B")]
    pub b_line: f64,
}

impl DsfCase {
    pub fn map(&self) -> Result<MapSpec> {
        MapSpec::dsf_inverse(self.a, self.b)
    }

    pub fn fixed_point(&self, which: FixedPoint) -> IPoint {
        match which {
            FixedPoint::Plus => self.pair.p_plus,
            FixedPoint::Minus => self.pair.p_minus,
        }
    }

    pub fn frame(&self, which: FixedPoint) -> &LocalFrame {
        &self.frames[which as usize]
    }

    pub fn target(&self, dir: Direction) -> TargetLine {
        match dir {
            Direction::Up => TargetLine::above(self.b_line),
            Direction::Down => TargetLine::below(-self.b_line),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DsfOptions {
    /// Cone slopes `L` tried in order.
    pub slopes: Vec<f64>,
    /// Window half-widths tried, largest first; `beta = 1.5 L alpha`.
    pub alphas: Vec<f64>,
    /// Launch distances per sign on the logarithmic grid.
    pub s_points: usize,
    pub max_m: usize,
    /// Candidates handed to the validator per branch.
    pub tries: usize,
    /// Restrict to one rotation number.
    pub kappa: Option<i64>,
    pub deadline: Option<Instant>,
}

impl Default for DsfOptions {
    fn default() -> Self {
        Self {
            slopes: vec![1.0, 4.0, 16.0],
            alphas: vec![1e-2, 3e-3, 1e-3, 3e-4, 1e-4, 1e-5],
            s_points: 48,
            max_m: 40,
            tries: 3,
            kappa: None,
            deadline: None,
        }
    }
}

impl DsfOptions {
    fn expired(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }
}

/// Builds the case for one rotation number: the first cone slope, and for
/// it the widest window, on which both frames pass the geometry and cone
/// checks.
pub fn build_case(
    a: Interval,
    b: Interval,
    kappa: i64,
    opts: &DsfOptions,
) -> std::result::Result<DsfCase, FailReason> {
    let map = MapSpec::dsf_inverse(a, b).map_err(|_| FailReason::NoFixedPoint)?;
    let pair = dsf_fixed_pair(a, b, kappa).map_err(|_| FailReason::NoFixedPoint)?;
    let mut reason = FailReason::Frame;
    let ladder = opts
        .slopes
        .iter()
        .flat_map(|&l| opts.alphas.iter().map(move |&a| (l, a)));
    for (l, alpha) in ladder {
        let beta = 1.5 * l * alpha;
        let mk = |fp| local_frame(&map, fp, l, alpha, beta);
        let (Ok(fplus), Ok(fminus)) = (mk(pair.p_plus), mk(pair.p_minus)) else {
            return Err(FailReason::Frame);
        };
        let ok = [(pair.p_plus, &fplus), (pair.p_minus, &fminus)]
            .iter()
            .all(|(fp, fr)| geometry_check(fr) && cone_check(&map, *fp, fr));
        if ok {
            return Ok(DsfCase {
                a,
                b,
                kappa,
                pair,
                n: box_chain_length(kappa),
                frames: [fplus, fminus],
                b_line: dsf_b(b.hi()),
            });
        }
        reason = FailReason::Cone;
    }
    Err(reason)
}

/// A float orbit launched from `fp + h0 A (1, 0)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DsfCandidate {
    pub h0: f64,
    pub points: Vec<[f64; 2]>,
}

/// Launches along the unstable direction with `|h0|` on a logarithmic grid
/// up to `min(1e-2, alpha / 2)` and keeps the shortest orbits crossing the
/// requested line.
pub fn find_branch_candidates(
    case: &DsfCase,
    which: FixedPoint,
    dir: Direction,
    opts: &DsfOptions,
) -> Vec<DsfCandidate> {
    let Ok(map) = case.map() else {
        return Vec::new();
    };
    let f = map.midpoint();
    let fp = case.fixed_point(which).map(|c| c.mid());
    let frame = case.frame(which);
    let u = [frame.a[0][0], frame.a[1][0]];
    // The escape side depends on where h0 falls within one unstable period,
    // so the grid spans at least two factors of the unstable eigenvalue.
    let s_max = (0.5 * frame.alpha).min(1e-2);
    let span = frame.eigenvalues[0].powi(2).max(1e4);
    let s_min = 1e-6f64.min(s_max / span);
    let n = opts.s_points.max(2);
    let mut found: Vec<(usize, f64)> = Vec::new();
    for sign in [1.0, -1.0] {
        for i in 0..n {
            let t = i as f64 / (n - 1) as f64;
            let h = sign * s_min * (s_max / s_min).powf(t);
            let mut p = [fp[0] + h * u[0], fp[1] + h * u[1]];
            for k in 1..=opts.max_m {
                p = f.eval_f64(p);
                if !p[1].is_finite() {
                    break;
                }
                let crossed = match dir {
                    Direction::Up => p[1] > case.b_line,
                    Direction::Down => p[1] < -case.b_line,
                };
                if crossed {
                    found.push((k, h));
                    break;
                }
                if p[1].abs() > case.b_line {
                    break;
                }
            }
        }
    }
    found.sort_by(|a, b| a.0.cmp(&b.0).then(b.1.abs().total_cmp(&a.1.abs())));
    found
        .into_iter()
        .take(opts.tries)
        .map(|(m, h)| {
            let mut pts = vec![[fp[0] + h * u[0], fp[1] + h * u[1]]];
            for _ in 0..m {
                let last = *pts.last().unwrap();
                pts.push(f.eval_f64(last));
            }
            DsfCandidate { h0: h, points: pts }
        })
        .collect()
}

/// Checks on `h0` once the shooting problem is validated: `v~(z) =
/// h0(z) (1, z L)` stays in `U~`, and `h0` keeps one sign so that
/// `pi_x v~([-1, 1])` is bounded away from zero.
pub fn segment_checks(frame: &LocalFrame, h0: Interval) -> std::result::Result<(), FailReason> {
    if h0.contains_zero() {
        return Err(FailReason::DegenerateSegment);
    }
    let zl = Interval::raw(-frame.l, frame.l);
    let w = frame.window();
    if !h0.subset(&w[0]) || !(h0 * zl).subset(&w[1]) {
        return Err(FailReason::SegmentOutsideWindow);
    }
    Ok(())
}

/// Shooting problem `q0 = fp`, `v0(z) = A (1, z L)`, `z in [-1, 1]`.
pub fn branch_problem(
    case: &DsfCase,
    which: FixedPoint,
    cand: &DsfCandidate,
    v1: [f64; 2],
) -> Result<ShootingProblem> {
    let frame = case.frame(which);
    let mut prob = ShootingProblem::from_orbit(
        case.map()?,
        case.fixed_point(which),
        StartDirection::Family {
            a: frame.a,
            l: frame.l,
        },
        cand.h0,
        &cand.points,
        v1,
        Some(Interval::raw(-1.0, 1.0)),
    )?;
    let kappa = match which {
        FixedPoint::Plus => case.kappa,
        FixedPoint::Minus => -case.kappa,
    };
    prob.anchor = Anchor::Rotating { kappa };
    Ok(prob)
}

pub fn validate_branch(
    case: &DsfCase,
    which: FixedPoint,
    dir: Direction,
    opts: &DsfOptions,
) -> std::result::Result<Certificate, FailReason> {
    let cands = find_branch_candidates(case, which, dir, opts);
    if cands.is_empty() {
        return Err(FailReason::NoCandidate);
    }
    let mut reason = FailReason::Krawczyk;
    for cand in &cands {
        for v1 in [[1.0, 0.0], [0.0, 1.0]] {
            if opts.expired() {
                return Err(FailReason::TimedOut);
            }
            let Ok(prob) = branch_problem(case, which, cand, v1) else {
                continue;
            };
            let Ok(cert) = validate(&prob, case.target(dir)) else {
                continue;
            };
            let Some(x) = &cert.x_enclosure else { continue };
            if !cert.verified {
                reason = FailReason::Endpoint;
                continue;
            }
            match segment_checks(case.frame(which), x[0]) {
                Ok(()) => return Ok(cert),
                Err(r) => reason = r,
            }
        }
    }
    Err(reason)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChaosCertificate {
    pub case: DsfCase,
    /// Branches (I), (III), (V), (VII) in the order of [`BRANCHES`].
    pub certificates: Vec<Certificate>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum DsfOutcome {
    Chaos(Box<ChaosCertificate>),
    Failed {
        reason: FailReason,
        kappas_tried: usize,
    },
}

impl DsfOutcome {
    pub fn is_chaos(&self) -> bool {
        matches!(self, DsfOutcome::Chaos(_))
    }
}

/// Tries `kappa = 1, 2, ...` below `a / (1 - b)` and returns the first
/// rotation number for which all four branches validate.
pub fn validate_dsf(a: Interval, b: Interval, opts: &DsfOptions) -> Result<DsfOutcome> {
    MapSpec::dsf_inverse(a, b)?;
    let range = match opts.kappa {
        Some(k) => k..=k,
        None => kappa_range(a, b),
    };
    let mut reason = FailReason::NoFixedPoint;
    let mut tried = 0;
    'kappa: for kappa in range {
        if opts.expired() {
            reason = FailReason::TimedOut;
            break;
        }
        tried += 1;
        let case = match build_case(a, b, kappa, opts) {
            Ok(c) => c,
            Err(r) => {
                reason = r;
                continue;
            }
        };
        let mut certs = Vec::with_capacity(4);
        for (which, dir) in BRANCHES {
            match validate_branch(&case, which, dir, opts) {
                Ok(c) => certs.push(c),
                Err(r) => {
                    reason = r;
                    if r == FailReason::TimedOut {
                        break 'kappa;
                    }
                    continue 'kappa;
                }
            }
        }
        return Ok(DsfOutcome::Chaos(Box::new(ChaosCertificate {
            case,
            certificates: certs,
        })));
    }
    Ok(DsfOutcome::Failed {
        reason,
        kappas_tried: tried,
    })
}
