//! A coarse mesh sweep of the non-twist standard family. Pass the mesh
//! size as an argument (default 10) and an output directory.

use annular_cap::sweep::{run_sweep, Family, Mode, Region, SweepConfig};

fn main() -> annular_cap::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(10);
    let out = args.next().unwrap_or_else(|| "ntsf-mesh".into());
    let mut cfg = SweepConfig::new(
        Family::Ntsf,
        Region::new(0.0, 1.0, 0.0, 1.0)?,
        Mode::Mesh { nx: n, ny: n },
        &out,
    );
    cfg.workers = std::thread::available_parallelism().map_or(1, |p| p.get());
    let rep = run_sweep(&cfg)?;
    println!("{}", serde_json::to_string_pretty(&rep.summary)?);
    println!("records, certificates and plot.csv in {out}");
    Ok(())
}
