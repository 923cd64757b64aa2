//! Certifies the five non-twist variations (h = sin) from the
//! tabulated seeds and prints one row per configuration.

use std::time::Instant;

use annular_cap::diffusion::{validate_diffusion, vsf_catalog, SearchOptions};
use annular_cap::maps::HChoice;

fn main() -> annular_cap::Result<()> {
    println!(
        "{:<6} {:<6} {:>3} {:>10} {:>22}",
        "h", "v", "m", "ms", "endpoint y"
    );
    for c in vsf_catalog().into_iter().filter(|c| c.h == HChoice::Sine) {
        let t = Instant::now();
        let r = validate_diffusion(
            &c.map()?,
            c.rho(),
            &SearchOptions::vsf().with_seed(Some(c.seed)),
        )?;
        let end = r.certificate.as_ref().and_then(|c| c.endpoint_enclosure);
        println!(
            "{:<6} {:<6} {:>3} {:>10.2} {:>22}",
            c.h.name(),
            c.v.name(),
            r.m.map_or("-".into(), |m| m.to_string()),
            t.elapsed().as_secs_f64() * 1e3,
            end.map_or("-".into(), |e| format!("{:.6}", e.lo())),
        );
    }
    Ok(())
}
