//! Independent re-check of stored certificates.
//!
//! The audit trusts only the stored map, the shooting data and the boxes.
//! It recomputes the residual, the derivative and a fresh Krawczyk image
//! with a dense preconditioner, so a certificate produced by the banded
//! pipeline is checked along a different route.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dsf::{cone_check, geometry_check, segment_checks, ChaosCertificate, BRANCHES};
use crate::error::Result;
use crate::ivl::{imat_apply, imat_mul, inverse_2x2, IMat, IVec, Interval, PointMat};
use crate::krawczyk::{Anchor, Certificate, StartDirection};
use crate::maps::{diffusion_threshold, dsf_b, dsf_fixed_pair, kappa_range, MapSpec};

/// What a certificate file holds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CertificateFile {
    /// A connecting orbit between two horizontal lines.
    Orbit(Certificate),
    /// Four connecting orbits at a rotating fixed-point pair.
    Chaos(ChaosCertificate),
}

impl CertificateFile {
    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_slice(&std::fs::read(path)?)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_vec(self)?)?;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub checks: Vec<Check>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    fn push(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }
}

fn first_violation(v: &IVec, ok: impl Fn(usize, &Interval) -> bool) -> Option<usize> {
    v.iter()
        .enumerate()
        .find(|(i, e)| !ok(*i, e))
        .map(|(i, _)| i)
}

/// Audits one connecting orbit. `prefix` labels the checks.
pub fn audit_orbit(cert: &Certificate, prefix: &str) -> AuditReport {
    let mut rep = AuditReport::default();
    let name = |s: &str| format!("{prefix}{s}");
    rep.push(
        name("claimed"),
        cert.verified,
        "certificate marked verified",
    );
    let (Some(x), Some(k)) = (&cert.x_enclosure, &cert.k) else {
        rep.push(name("enclosure"), false, "no stored box");
        return rep;
    };
    let prob = cert.problem();
    let n = prob.dim();
    if x.len() != n || k.len() != n || cert.candidate.len() != n {
        rep.push(name("dimensions"), false, format!("expected {n} unknowns"));
        return rep;
    }
    let stored = k.subset_interior(x).unwrap_or(false);
    rep.push(name("stored K in int X"), stored, "");
    rep.push(
        name("candidate in X"),
        x.contains_point(&cert.candidate),
        "",
    );

    let z = prob.z_range();
    // The zero lies in X, so the residual over X must contain zero.
    match prob.eval_f(x, z) {
        Ok(fx) => {
            let bad = first_violation(&fx, |_, e| e.contains_zero());
            let detail = bad.map_or(String::new(), |i| {
                format!("component {i} of F(X) is {} and misses zero", fx[i])
            });
            rep.push(name("residual F(X) contains 0"), bad.is_none(), detail);
        }
        Err(e) => rep.push(name("residual F(X) contains 0"), false, e.to_string()),
    }

    // Fresh Krawczyk image through dense arithmetic.
    let fresh = (|| -> Result<IVec> {
        let c = prob.preconditioner_dense(&cert.candidate, z.mid())?;
        let ci = IMat::from_points(&c);
        let fx0 = prob.eval_f_centered(&cert.candidate, z)?;
        let df = prob.eval_df_dense(x, z)?;
        let r = IMat::identity(n).sub(&imat_mul(&ci, &df)?)?;
        let x0 = IVec::from_points(&cert.candidate);
        let step = imat_apply(&ci, &fx0)?;
        let dev = imat_apply(&r, &x.sub(&x0)?)?;
        x0.sub(&step)?.add(&dev)
    })();
    match fresh {
        Ok(k2) => {
            let bad = first_violation(&k2, |i, e| e.subset_interior(&x[i]));
            let detail = bad.map_or(String::new(), |i| {
                format!("component {i}: K' = {} not inside X = {}", k2[i], x[i])
            });
            rep.push(name("recomputed K' in int X"), bad.is_none(), detail);
        }
        Err(e) => rep.push(name("recomputed K' in int X"), false, e.to_string()),
    }

    let y = prob.end_point(x[1])[1];
    rep.push(
        name("endpoint crosses target"),
        cert.target.crossed_by(y),
        format!("y-range {y}, line {}", cert.target.level),
    );
    rep
}

fn audit_diffusion_line(cert: &Certificate, rep: &mut AuditReport) {
    // Standard-family runs start on y = -B heading for y = B.
    let start_ok = matches!(cert.v0, StartDirection::Fixed { v } if v == [1.0, 0.0])
        && cert.anchor == Anchor::Fixed
        && cert.q0[1] == Interval::point(-cert.target.level)
        && cert.target.above;
    rep.push("start on y = -B", start_ok, "");
    let rho = match &cert.map {
        MapSpec::Vsf { h, .. } if !h.is_twist() => Some(2),
        _ => None,
    };
    let line = diffusion_threshold(&cert.map, rho).and_then(|t| t.check_line(cert.target.level));
    rep.push(
        "line clears half the threshold",
        line.is_ok(),
        line.err().map_or(String::new(), |e| e.to_string()),
    );
}

/// Audits the four branches and the local hypotheses of a chaos certificate.
pub fn audit_chaos(cc: &ChaosCertificate) -> AuditReport {
    let mut rep = AuditReport::default();
    let case = &cc.case;
    let Ok(map) = case.map() else {
        rep.push("map parameters", false, "invalid dissipative parameters");
        return rep;
    };
    rep.push(
        "kappa in range",
        kappa_range(case.a, case.b).contains(&case.kappa),
        format!("kappa = {}", case.kappa),
    );
    match dsf_fixed_pair(case.a, case.b, case.kappa) {
        Ok(pair) => rep.push("fixed points", pair == case.pair, ""),
        Err(e) => rep.push("fixed points", false, e.to_string()),
    }
    rep.push("line B", case.b_line >= dsf_b(case.b.hi()), "");
    rep.push("branch count", cc.certificates.len() == BRANCHES.len(), "");
    for (i, frame) in case.frames.iter().enumerate() {
        let fp = [case.pair.p_plus, case.pair.p_minus][i];
        // Rebuild A^-1 rather than trusting the stored one.
        let mut f = frame.clone();
        let a = PointMat::from_rows(&[&frame.a[0], &frame.a[1]]);
        let inv = a.and_then(|a| inverse_2x2(&IMat::from_points(&a)));
        let Ok(inv) = inv else {
            rep.push(format!("frame {i}"), false, "singular frame");
            continue;
        };
        f.a_inv = [[inv[(0, 0)], inv[(0, 1)]], [inv[(1, 0)], inv[(1, 1)]]];
        rep.push(format!("frame {i} geometry"), geometry_check(&f), "");
        rep.push(format!("frame {i} cone"), cone_check(&map, fp, &f), "");
        rep.push(format!("frame {i} slopes"), f.beta > f.l * f.alpha, "");
    }
    for ((which, dir), cert) in BRANCHES.iter().zip(&cc.certificates) {
        let prefix = format!("{which:?}/{dir:?}: ");
        let frame = case.frame(*which);
        let kappa = match which {
            crate::dsf::FixedPoint::Plus => case.kappa,
            crate::dsf::FixedPoint::Minus => -case.kappa,
        };
        let setup = cert.map == map
            && cert.q0 == case.fixed_point(*which)
            && cert.anchor == (Anchor::Rotating { kappa })
            && cert.target == case.target(*dir)
            && cert.v0
                == (StartDirection::Family {
                    a: frame.a,
                    l: frame.l,
                })
            && cert.z_domain == Some(Interval::raw(-1.0, 1.0));
        rep.push(format!("{prefix}setup"), setup, "");
        if let Some(x) = &cert.x_enclosure {
            let seg = segment_checks(frame, x[0]);
            rep.push(
                format!("{prefix}segment"),
                seg.is_ok(),
                seg.err().map_or(String::new(), |r| format!("{r:?}")),
            );
        }
        rep.checks.extend(audit_orbit(cert, &prefix).checks);
    }
    rep
}

pub fn audit(file: &CertificateFile) -> AuditReport {
    match file {
        CertificateFile::Orbit(cert) => {
            let mut rep = audit_orbit(cert, "");
            if matches!(cert.map, MapSpec::Vsf { .. } | MapSpec::Ntsf { .. }) {
                audit_diffusion_line(cert, &mut rep);
            }
            rep
        }
        CertificateFile::Chaos(cc) => audit_chaos(cc),
    }
}

pub fn recheck(path: &Path) -> Result<AuditReport> {
    Ok(audit(&CertificateFile::load(path)?))
}
