//! Parallel, resumable parameter sweeps.
//!
//! A run directory holds `config.json`, the append-only `records.jsonl`,
//! one certificate file per validated unit under `certs/`, and the
//! derived `summary.json` and `plot.csv`. Workers claim unit indices from
//! an atomic counter and hand finished records to the calling thread,
//! which is the only writer. Reports are built from the records sorted by
//! unit id, so they do not depend on scheduling.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::{self, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::audit::CertificateFile;
use crate::diffusion::{validate_diffusion, DiffusionStatus, SearchOptions};
use crate::dsf::{validate_dsf, DsfOptions, DsfOutcome, FailReason};
use crate::error::{Error, Result};
use crate::ivl::Interval;
use crate::maps::MapSpec;

pub const DEFAULT_UNIT_BUDGET: Duration = Duration::from_secs(60);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Ntsf,
    Dsf,
}

/// Rectangle `[a0, a1] x [b0, b1]` in parameter space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub a: [f64; 2],
    pub b: [f64; 2],
}

impl Region {
    pub fn new(a0: f64, a1: f64, b0: f64, b1: f64) -> Result<Self> {
        if !(a0 <= a1 && b0 <= b1) || ![a0, a1, b0, b1].iter().all(|v| v.is_finite()) {
            return Err(Error::Precondition(format!(
                "bad region [{a0}, {a1}] x [{b0}, {b1}]"
            )));
        }
        Ok(Self {
            a: [a0, a1],
            b: [b0, b1],
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Mode {
    /// Grid points including both corners.
    Mesh { nx: usize, ny: usize },
    /// `nx x ny` initial boxes, each split `branching x branching` on
    /// failure, at most `max_depth` times.
    Subdivide {
        nx: usize,
        ny: usize,
        branching: usize,
        max_depth: u32,
    },
}

impl Mode {
    pub fn subdivide(nx: usize, ny: usize, max_depth: u32) -> Self {
        Mode::Subdivide {
            nx,
            ny,
            branching: 5,
            max_depth,
        }
    }

    fn grid(&self) -> (usize, usize) {
        match *self {
            Mode::Mesh { nx, ny } | Mode::Subdivide { nx, ny, .. } => (nx, ny),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub family: Family,
    pub region: Region,
    pub mode: Mode,
    pub workers: usize,
    pub out: PathBuf,
    pub resume: bool,
    /// Wall-clock budget per unit of the dissipative sweep.
    pub unit_budget: Duration,
}

/// The part of the configuration that determines the results.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StoredConfig {
    pub family: Family,
    pub region: Region,
    pub mode: Mode,
    pub unit_budget_ms: u64,
    pub config_hash: String,
}

impl SweepConfig {
    pub fn new(family: Family, region: Region, mode: Mode, out: impl Into<PathBuf>) -> Self {
        Self {
            family,
            region,
            mode,
            workers: 1,
            out: out.into(),
            resume: false,
            unit_budget: DEFAULT_UNIT_BUDGET,
        }
    }

    fn validate(&self) -> Result<()> {
        let (nx, ny) = self.mode.grid();
        if nx == 0 || ny == 0 {
            return Err(Error::Precondition("grid sizes must be at least 1".into()));
        }
        if let Mode::Subdivide {
            branching,
            max_depth,
            ..
        } = self.mode
        {
            if branching < 2 {
                return Err(Error::Precondition("branching must be at least 2".into()));
            }
            // Area units per initial box must fit comfortably in a u64.
            if (branching as f64).powi(2 * max_depth as i32) > 1e15 {
                return Err(Error::Precondition("subdivision too deep".into()));
            }
        }
        match (self.family, self.mode) {
            (Family::Ntsf, Mode::Mesh { .. }) | (Family::Dsf, Mode::Subdivide { .. }) => Ok(()),
            _ => Err(Error::Precondition(
                "mesh mode is for ntsf, subdivision mode is for dsf".into(),
            )),
        }
    }

    pub fn stored(&self) -> StoredConfig {
        let mut s = StoredConfig {
            family: self.family,
            region: self.region,
            mode: self.mode,
            unit_budget_ms: self.unit_budget.as_millis() as u64,
            config_hash: String::new(),
        };
        let bytes = serde_json::to_vec(&s).expect("config serialises");
        s.config_hash = Sha256::digest(&bytes)
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect();
        s
    }

    pub fn config_hash(&self) -> String {
        self.stored().config_hash
    }

    pub fn unit_count(&self) -> usize {
        let (nx, ny) = self.mode.grid();
        nx * ny
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitStatus {
    Verified,
    /// Part of the box validated after subdivision.
    Partial,
    NoCandidate,
    ValidationFailed,
    /// No sub-box validated.
    Failed,
    TimedOut,
    /// Parameters outside the family's domain.
    Invalid,
}

impl UnitStatus {
    pub fn name(self) -> &'static str {
        match self {
            UnitStatus::Verified => "verified",
            UnitStatus::Partial => "partial",
            UnitStatus::NoCandidate => "no_candidate",
            UnitStatus::ValidationFailed => "validation_failed",
            UnitStatus::Failed => "failed",
            UnitStatus::TimedOut => "timed_out",
            UnitStatus::Invalid => "invalid",
        }
    }
}

/// A validated sub-box of a subdivision unit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Leaf {
    /// Child indices from the initial box down, `0` for the box itself.
    pub path: String,
    pub depth: u32,
    #[serde(rename = "box")]
    pub bounds: [f64; 4],
    pub kappa: i64,
    pub cert_path: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnitRecord {
    pub unit_id: usize,
    pub family: Family,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<[f64; 2]>,
    /// `[a_lo, a_hi, b_lo, b_hi]`.
    #[serde(rename = "box", default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<[f64; 4]>,
    pub status: UnitStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cert_path: Option<String>,
    /// Validated area in units of `branching^(-2 max_depth)` of the box.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verified_area: Option<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub leaves: Vec<Leaf>,
    pub ms: u64,
}

/// Aggregate written to `summary.json`. Contains no timings, so it is
/// reproducible byte for byte.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub verified: usize,
    pub fraction: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub area_fraction: Option<f64>,
    /// Exact validated area as `[numerator, denominator]` in box units.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verified_area: Option<[u64; 2]>,
    pub statuses: BTreeMap<String, usize>,
    pub config_hash: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepReport {
    pub summary: Summary,
    /// Records sorted by unit id.
    pub records: Vec<UnitRecord>,
}

impl SweepReport {
    pub fn total(&self) -> usize {
        self.summary.total
    }

    pub fn verified(&self) -> usize {
        self.summary.verified
    }

    pub fn fraction(&self) -> f64 {
        self.summary.fraction
    }
}

/// `lo + (hi - lo) i / n`; shared edges of neighbours get identical floats.
fn split(lo: f64, hi: f64, i: usize, n: usize) -> f64 {
    if i == 0 {
        lo
    } else if i == n {
        hi
    } else {
        lo + (hi - lo) * (i as f64 / n as f64)
    }
}

fn mesh_point(region: &Region, nx: usize, ny: usize, id: usize) -> [f64; 2] {
    let (i, j) = (id / ny, id % ny);
    let a = if nx == 1 {
        region.a[0]
    } else {
        split(region.a[0], region.a[1], i, nx - 1)
    };
    let b = if ny == 1 {
        region.b[0]
    } else {
        split(region.b[0], region.b[1], j, ny - 1)
    };
    [a, b]
}

fn initial_box(region: &Region, nx: usize, ny: usize, id: usize) -> [f64; 4] {
    let (i, j) = (id / ny, id % ny);
    [
        split(region.a[0], region.a[1], i, nx),
        split(region.a[0], region.a[1], i + 1, nx),
        split(region.b[0], region.b[1], j, ny),
        split(region.b[0], region.b[1], j + 1, ny),
    ]
}

struct Finished {
    record: UnitRecord,
    files: Vec<(String, CertificateFile)>,
}

fn ntsf_unit(id: usize, p: [f64; 2]) -> Finished {
    let t = Instant::now();
    let mut record = UnitRecord {
        unit_id: id,
        family: Family::Ntsf,
        params: Some(p),
        bounds: None,
        status: UnitStatus::NoCandidate,
        kappa: None,
        m: None,
        cert_path: None,
        verified_area: None,
        leaves: Vec::new(),
        ms: 0,
    };
    let mut files = Vec::new();
    // b = 0 is integrable: every orbit keeps its height.
    if p[1] != 0.0 {
        let outcome = MapSpec::ntsf(p[0], p[1])
            .and_then(|map| validate_diffusion(&map, None, &SearchOptions::ntsf()));
        match outcome {
            Ok(r) => {
                record.m = r.m;
                record.status = match r.status {
                    DiffusionStatus::Verified => UnitStatus::Verified,
                    DiffusionStatus::NoCandidate => UnitStatus::NoCandidate,
                    DiffusionStatus::ValidationFailed => UnitStatus::ValidationFailed,
                };
                if let (UnitStatus::Verified, Some(cert)) = (record.status, r.certificate) {
                    let path = format!("certs/ntsf-{id:07}.json");
                    record.cert_path = Some(path.clone());
                    files.push((path, CertificateFile::Orbit(cert)));
                }
            }
            Err(_) => record.status = UnitStatus::Invalid,
        }
    }
    record.ms = t.elapsed().as_millis() as u64;
    Finished { record, files }
}

struct Subdivision<'a> {
    unit: usize,
    branching: usize,
    max_depth: u32,
    opts: &'a DsfOptions,
    leaves: Vec<Leaf>,
    files: Vec<(String, CertificateFile)>,
    timed_out: bool,
    invalid: bool,
}

impl Subdivision<'_> {
    fn weight(&self, depth: u32) -> u64 {
        (self.branching as u64 * self.branching as u64).pow(self.max_depth - depth)
    }

    /// Validated area of the box in units of the deepest level.
    fn visit(&mut self, bounds: [f64; 4], depth: u32, path: String) -> u64 {
        if self.timed_out {
            return 0;
        }
        let ivl = |lo: f64, hi: f64| Interval::new(lo, hi);
        let outcome = ivl(bounds[0], bounds[1])
            .and_then(|a| Ok((a, ivl(bounds[2], bounds[3])?)))
            .and_then(|(a, b)| validate_dsf(a, b, self.opts));
        match outcome {
            Ok(DsfOutcome::Chaos(cc)) => {
                let cert_path = format!("certs/dsf-{:07}-{path}.json", self.unit);
                self.leaves.push(Leaf {
                    path,
                    depth,
                    bounds,
                    kappa: cc.case.kappa,
                    cert_path: cert_path.clone(),
                });
                self.files.push((cert_path, CertificateFile::Chaos(*cc)));
                return self.weight(depth);
            }
            Ok(DsfOutcome::Failed {
                reason: FailReason::TimedOut,
                ..
            }) => {
                self.timed_out = true;
                return 0;
            }
            Ok(DsfOutcome::Failed { .. }) => {}
            Err(_) => self.invalid = true,
        }
        if depth == self.max_depth {
            return 0;
        }
        let n = self.branching;
        let mut area = 0;
        for i in 0..n {
            for j in 0..n {
                let child = [
                    split(bounds[0], bounds[1], i, n),
                    split(bounds[0], bounds[1], i + 1, n),
                    split(bounds[2], bounds[3], j, n),
                    split(bounds[2], bounds[3], j + 1, n),
                ];
                area += self.visit(child, depth + 1, format!("{path}-{}", i * n + j));
            }
        }
        area
    }
}

fn dsf_unit(
    id: usize,
    bounds: [f64; 4],
    branching: usize,
    max_depth: u32,
    budget: Duration,
) -> Finished {
    let t = Instant::now();
    let opts = DsfOptions {
        deadline: Some(t + budget),
        ..DsfOptions::default()
    };
    let mut sub = Subdivision {
        unit: id,
        branching,
        max_depth,
        opts: &opts,
        leaves: Vec::new(),
        files: Vec::new(),
        timed_out: false,
        invalid: false,
    };
    let area = sub.visit(bounds, 0, "0".into());
    let full = sub.weight(0);
    let status = if area == full {
        UnitStatus::Verified
    } else if sub.timed_out {
        UnitStatus::TimedOut
    } else if area > 0 {
        UnitStatus::Partial
    } else if sub.invalid {
        UnitStatus::Invalid
    } else {
        UnitStatus::Failed
    };
    let root = sub.leaves.first().filter(|l| l.depth == 0);
    let record = UnitRecord {
        unit_id: id,
        family: Family::Dsf,
        params: None,
        bounds: Some(bounds),
        status,
        kappa: root.map(|l| l.kappa),
        m: None,
        cert_path: root.map(|l| l.cert_path.clone()),
        verified_area: Some(area),
        leaves: sub.leaves,
        ms: t.elapsed().as_millis() as u64,
    };
    Finished {
        record,
        files: sub.files,
    }
}

fn run_unit(cfg: &SweepConfig, id: usize) -> Finished {
    let (nx, ny) = cfg.mode.grid();
    match cfg.mode {
        Mode::Mesh { .. } => ntsf_unit(id, mesh_point(&cfg.region, nx, ny, id)),
        Mode::Subdivide {
            branching,
            max_depth,
            ..
        } => dsf_unit(
            id,
            initial_box(&cfg.region, nx, ny, id),
            branching,
            max_depth,
            cfg.unit_budget,
        ),
    }
}

const CONFIG_FILE: &str = "config.json";
const RECORDS_FILE: &str = "records.jsonl";
const SUMMARY_FILE: &str = "summary.json";
const PLOT_FILE: &str = "plot.csv";

/// Reads the complete records of a run; a torn last line is dropped.
fn read_records(dir: &Path) -> Result<Vec<UnitRecord>> {
    let path = dir.join(RECORDS_FILE);
    if !path.exists() {
        return Ok(Vec::new());
    }
    let text = fs::read_to_string(path)?;
    Ok(text
        .lines()
        .filter_map(|l| serde_json::from_str::<UnitRecord>(l).ok())
        .collect())
}

fn write_records(dir: &Path, records: &[UnitRecord]) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(dir.join(RECORDS_FILE))?);
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

fn load_config(dir: &Path) -> Result<StoredConfig> {
    Ok(serde_json::from_slice(&fs::read(dir.join(CONFIG_FILE))?)?)
}

/// Runs every unit not yet recorded, then rebuilds the report.
fn run(cfg: &SweepConfig) -> Result<SweepReport> {
    cfg.validate()?;
    let dir = &cfg.out;
    fs::create_dir_all(dir.join("certs"))?;
    let stored = cfg.stored();
    let mut done = BTreeSet::new();
    if cfg.resume && dir.join(CONFIG_FILE).exists() {
        let prior = load_config(dir)?;
        if prior.config_hash != stored.config_hash {
            return Err(Error::ConfigMismatch {
                expected: prior.config_hash,
                found: stored.config_hash,
            });
        }
        // Rewrite without a possibly torn tail before appending.
        let mut records = read_records(dir)?;
        records.retain(|r| r.unit_id < cfg.unit_count() && done.insert(r.unit_id));
        write_records(dir, &records)?;
    } else {
        write_records(dir, &[])?;
    }
    fs::write(dir.join(CONFIG_FILE), serde_json::to_vec_pretty(&stored)?)?;

    let pending: Vec<usize> = (0..cfg.unit_count())
        .filter(|id| !done.contains(id))
        .collect();
    let next = AtomicUsize::new(0);
    let mut out = BufWriter::new(
        OpenOptions::new()
            .append(true)
            .open(dir.join(RECORDS_FILE))?,
    );
    let mut first_err: Option<Error> = None;
    std::thread::scope(|s| {
        let (tx, rx) = mpsc::channel::<Finished>();
        for _ in 0..cfg.workers.max(1) {
            let tx = tx.clone();
            let (next, pending) = (&next, &pending);
            s.spawn(move || loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&id) = pending.get(i) else { break };
                if tx.send(run_unit(cfg, id)).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        for fin in rx {
            let res = (|| -> Result<()> {
                for (path, file) in &fin.files {
                    file.save(&dir.join(path))?;
                }
                serde_json::to_writer(&mut out, &fin.record)?;
                out.write_all(b"\n")?;
                out.flush()?;
                Ok(())
            })();
            if let Err(e) = res {
                first_err.get_or_insert(e);
            }
        }
    });
    if let Some(e) = first_err {
        return Err(e);
    }
    report(dir)
}

pub fn run_mesh(cfg: &SweepConfig) -> Result<SweepReport> {
    if !matches!(cfg.mode, Mode::Mesh { .. }) {
        return Err(Error::Precondition("run_mesh needs mesh mode".into()));
    }
    run(cfg)
}

pub fn run_subdivide(cfg: &SweepConfig) -> Result<SweepReport> {
    if !matches!(cfg.mode, Mode::Subdivide { .. }) {
        return Err(Error::Precondition(
            "run_subdivide needs subdivision mode".into(),
        ));
    }
    run(cfg)
}

/// Continues the run stored at `cfg.out`.
pub fn resume(cfg: &SweepConfig) -> Result<SweepReport> {
    run(&SweepConfig {
        resume: true,
        ..cfg.clone()
    })
}

/// Runs whichever mode the configuration names.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    run(cfg)
}

/// Builds the report of a run directory and rewrites `summary.json` and
/// `plot.csv`.
pub fn report(dir: &Path) -> Result<SweepReport> {
    let cfg = load_config(dir)?;
    let mut records = read_records(dir)?;
    records.sort_by_key(|r| r.unit_id);
    records.dedup_by_key(|r| r.unit_id);
    let total = records.len();
    let verified = records
        .iter()
        .filter(|r| r.status == UnitStatus::Verified)
        .count();
    let mut statuses = BTreeMap::new();
    for r in &records {
        *statuses.entry(r.status.name().to_string()).or_insert(0) += 1;
    }
    let verified_area = match cfg.mode {
        Mode::Subdivide {
            branching,
            max_depth,
            ..
        } => {
            let per_box = (branching as u64 * branching as u64).pow(max_depth);
            let num: u64 = records.iter().filter_map(|r| r.verified_area).sum();
            Some([num, per_box * total as u64])
        }
        Mode::Mesh { .. } => None,
    };
    let ratio = |n: u64, d: u64| if d == 0 { 0.0 } else { n as f64 / d as f64 };
    let summary = Summary {
        total,
        verified,
        fraction: ratio(verified as u64, total as u64),
        area_fraction: verified_area.map(|[n, d]| ratio(n, d)),
        verified_area,
        statuses,
        config_hash: cfg.config_hash,
    };
    fs::write(dir.join(SUMMARY_FILE), serde_json::to_vec_pretty(&summary)?)?;
    let mut plot = BufWriter::new(fs::File::create(dir.join(PLOT_FILE))?);
    writeln!(plot, "a,b,status")?;
    for r in &records {
        let p = match (r.params, r.bounds) {
            (Some(p), _) => p,
            (None, Some(b)) => [0.5 * (b[0] + b[1]), 0.5 * (b[2] + b[3])],
            (None, None) => continue,
        };
        writeln!(plot, "{},{},{}", p[0], p[1], r.status.name())?;
    }
    plot.flush()?;
    Ok(SweepReport { summary, records })
}
