//! Subdivision sweep of the dissipative family over a small region.

use annular_cap::sweep::{run_sweep, Family, Mode, Region, SweepConfig};

fn main() -> annular_cap::Result<()> {
    let out = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "dsf-sweep".into());
    let mut cfg = SweepConfig::new(
        Family::Dsf,
        Region::new(4.0, 5.0, 0.2, 0.4)?,
        Mode::subdivide(4, 2, 2),
        &out,
    );
    cfg.workers = std::thread::available_parallelism().map_or(1, |p| p.get());
    let rep = run_sweep(&cfg)?;
    for r in &rep.records {
        println!(
            "unit {:>2} {:?} kappa {:?} leaves {}",
            r.unit_id,
            r.status,
            r.kappa,
            r.leaves.len()
        );
    }
    println!("area fraction {:?}", rep.summary.area_fraction);
    Ok(())
}
