//! Command-line front end. Exit codes: 0 on success, 1 when a validation
//! does not go through, 2 on usage or domain errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::audit::{recheck, CertificateFile};
use crate::diffusion::{
    orbit, validate_diffusion, vsf_catalog, write_trajectory_csv, DiffusionStatus, SearchOptions,
};
use crate::dsf::{validate_dsf, DsfOptions, DsfOutcome};
use crate::error::{Error, Result};
use crate::maps::{parse_interval, HChoice, MapSpec, VChoice};
use crate::sweep::{self, Family, Mode, Region, SweepConfig};

#[derive(Parser, Debug)]
#[command(
    name = "annular-cap",
    version,
    about = "Validated diffusion and chaos certificates for annular maps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum HArg {
    Id,
    Sin,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum VArg {
    Lin,
    Quad,
    Tan,
    Log,
    Exp,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FamilyArg {
    Ntsf,
    Dsf,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Certify one of the tabulated standard-family variations.
    Vsf {
        #[arg(long)]
        h: HArg,
        #[arg(long)]
        v: VArg,
        /// Start abscissa on y = -5; defaults to the tabulated one.
        #[arg(long = "seed-x")]
        seed_x: Option<f64>,
        /// Certificate output path.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Certify diffusion for the non-twist standard family at one point.
    Ntsf {
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, allow_hyphen_values = true)]
        b: f64,
        #[arg(long = "max-m", default_value_t = 300)]
        max_m: usize,
    },
    /// Certify a rotational horseshoe for the dissipative family.
    Dsf {
        /// A number or an interval `[lo,hi]`.
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        kappa: Option<i64>,
    },
    /// Plain floating-point orbit, for plots.
    Orbit {
        #[arg(long)]
        map: String,
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
        #[arg(long, allow_hyphen_values = true)]
        y: f64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        csv: PathBuf,
    },
    /// Parameter sweep over a mesh or with box subdivision.
    Sweep {
        #[arg(long)]
        family: FamilyArg,
        /// `x0,x1,y0,y1`.
        #[arg(long, allow_hyphen_values = true)]
        region: String,
        /// `NX,NY`.
        #[arg(long)]
        grid: String,
        #[arg(long)]
        subdivide: bool,
        #[arg(long, default_value_t = 3)]
        depth: u32,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        resume: bool,
    },
    /// Independent audit of a certificate file.
    Recheck {
        #[arg(long)]
        cert: PathBuf,
    },
    /// Rebuild the summary and plot files of a sweep directory.
    Report {
        #[arg(long)]
        dir: PathBuf,
    },
}

enum Outcome {
    Success,
    NotValidated,
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}

fn parse_list<T: std::str::FromStr>(s: &str, n: usize, what: &str) -> Result<Vec<T>> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != n {
        return Err(usage(format!(
            "{what} needs {n} comma-separated values, got {s:?}"
        )));
    }
    parts
        .iter()
        .map(|p| {
            p.parse()
                .map_err(|_| usage(format!("cannot parse {p:?} in {what}")))
        })
        .collect()
}

fn ensure_parent(path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    Ok(())
}

fn cmd_vsf(h: HArg, v: VArg, seed_x: Option<f64>, json: Option<PathBuf>) -> Result<Outcome> {
    let h = match h {
        HArg::Id => HChoice::Identity,
        HArg::Sin => HChoice::Sine,
    };
    let v = match v {
        VArg::Lin => VChoice::Linear,
        VArg::Quad => VChoice::Quadratic,
        VArg::Tan => VChoice::Tan,
        VArg::Log => VChoice::Log,
        VArg::Exp => VChoice::Exp,
    };
    let cfg = vsf_catalog()
        .into_iter()
        .find(|c| c.h == h && c.v == v)
        .expect("every combination is tabulated");
    let map = cfg.map()?;
    let seed = seed_x.unwrap_or(cfg.seed);
    let r = validate_diffusion(&map, cfg.rho(), &SearchOptions::vsf().with_seed(Some(seed)))?;
    println!("map {map}");
    println!(
        "N {}  M {}  B {}",
        r.thresholds.n, r.thresholds.m, r.thresholds.b
    );
    println!("status {:?}", r.status);
    if let Some(m) = r.m {
        println!("m={m}");
    }
    let Some(cert) = r
        .certificate
        .filter(|_| r.status == DiffusionStatus::Verified)
    else {
        return Ok(Outcome::NotValidated);
    };
    if let Some(y) = cert.endpoint_enclosure {
        println!("endpoint y {y}");
    }
    let path = json.unwrap_or_else(|| PathBuf::from(format!("vsf-{}-{}.json", h.name(), v.name())));
    ensure_parent(&path)?;
    CertificateFile::Orbit(cert.clone()).save(&path)?;
    let csv = path.with_extension("csv");
    write_trajectory_csv(&cert, fs::File::create(&csv)?)?;
    println!("certificate {}", path.display());
    println!("trajectory {}", csv.display());
    Ok(Outcome::Success)
}

fn cmd_ntsf(a: f64, b: f64, max_m: usize) -> Result<Outcome> {
    let map = MapSpec::ntsf(a, b)?;
    let opts = SearchOptions {
        max_m,
        ..SearchOptions::ntsf()
    };
    let r = validate_diffusion(&map, None, &opts)?;
    println!("map {map}");
    println!("M {}  B {}", r.thresholds.m, r.thresholds.b);
    println!("status {:?}", r.status);
    if let Some(m) = r.m {
        println!("m={m}");
    }
    if let Some(y) = r.certificate.as_ref().and_then(|c| c.endpoint_enclosure) {
        println!("endpoint y {y}");
    }
    Ok(match r.status {
        DiffusionStatus::Verified => Outcome::Success,
        _ => Outcome::NotValidated,
    })
}

fn cmd_dsf(a: &str, b: &str, kappa: Option<i64>) -> Result<Outcome> {
    let a = parse_interval(a).map_err(usage)?;
    let b = parse_interval(b).map_err(usage)?;
    let opts = DsfOptions {
        kappa,
        ..DsfOptions::default()
    };
    match validate_dsf(a, b, &opts)? {
        DsfOutcome::Chaos(cc) => {
            let c = &cc.case;
            println!("chaos kappa={} N={} B={}", c.kappa, c.n, c.b_line);
            for (i, f) in c.frames.iter().enumerate() {
                println!("frame {i}: L={} alpha={} beta={}", f.l, f.alpha, f.beta);
            }
            for cert in &cc.certificates {
                let x = cert.x_enclosure.as_ref().expect("verified");
                println!(
                    "branch m={} h0={} endpoint y {}",
                    cert.m,
                    x[0],
                    cert.endpoint_enclosure.expect("verified")
                );
            }
            Ok(Outcome::Success)
        }
        DsfOutcome::Failed {
            reason,
            kappas_tried,
        } => {
            println!("failed {reason:?} after {kappas_tried} rotation numbers");
            Ok(Outcome::NotValidated)
        }
    }
}

fn cmd_orbit(map: &str, x: f64, y: f64, n: usize, csv: &Path) -> Result<Outcome> {
    let map: MapSpec = map.parse()?;
    ensure_parent(csv)?;
    let mut out = std::io::BufWriter::new(fs::File::create(csv)?);
    writeln!(out, "i,x,y")?;
    for (i, p) in orbit(&map, [x, y], n).iter().enumerate() {
        writeln!(out, "{i},{},{}", p[0], p[1])?;
    }
    out.flush()?;
    println!("{} points written to {}", n + 1, csv.display());
    Ok(Outcome::Success)
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    family: FamilyArg,
    region: &str,
    grid: &str,
    subdivide: bool,
    depth: u32,
    workers: usize,
    out: PathBuf,
    resume: bool,
) -> Result<Outcome> {
    let r: Vec<f64> = parse_list(region, 4, "--region")?;
    let g: Vec<usize> = parse_list(grid, 2, "--grid")?;
    let family = match family {
        FamilyArg::Ntsf => Family::Ntsf,
        FamilyArg::Dsf => Family::Dsf,
    };
    let mode = if subdivide {
        Mode::subdivide(g[0], g[1], depth)
    } else {
        Mode::Mesh { nx: g[0], ny: g[1] }
    };
    let mut cfg = SweepConfig::new(family, Region::new(r[0], r[1], r[2], r[3])?, mode, out);
    cfg.workers = workers;
    cfg.resume = resume;
    let rep = sweep::run_sweep(&cfg)?;
    println!("{}", serde_json::to_string_pretty(&rep.summary)?);
    Ok(Outcome::Success)
}

fn cmd_recheck(path: &Path) -> Result<Outcome> {
    let rep = recheck(path)?;
    if rep.passed() {
        println!(
            "certificate {} passes {} checks",
            path.display(),
            rep.checks.len()
        );
        return Ok(Outcome::Success);
    }
    println!("certificate {} FAILS", path.display());
    for c in rep.failures() {
        if c.detail.is_empty() {
            println!("  violated: {}", c.name);
        } else {
            println!("  violated: {} ({})", c.name, c.detail);
        }
    }
    Ok(Outcome::NotValidated)
}

fn dispatch(cmd: Command) -> Result<Outcome> {
    match cmd {
        Command::Vsf { h, v, seed_x, json } => cmd_vsf(h, v, seed_x, json),
        Command::Ntsf { a, b, max_m } => cmd_ntsf(a, b, max_m),
        Command::Dsf { a, b, kappa } => cmd_dsf(&a, &b, kappa),
        Command::Orbit { map, x, y, n, csv } => cmd_orbit(&map, x, y, n, &csv),
        Command::Sweep {
            family,
            region,
            grid,
            subdivide,
            depth,
            workers,
            out,
            resume,
        } => cmd_sweep(
            family, &region, &grid, subdivide, depth, workers, out, resume,
        ),
        Command::Recheck { cert } => cmd_recheck(&cert),
        Command::Report { dir } => {
            let rep = sweep::report(&dir)?;
            println!("{}", serde_json::to_string_pretty(&rep.summary)?);
            Ok(Outcome::Success)
        }
    }
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(Outcome::Success) => 0,
        Ok(Outcome::NotValidated) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
