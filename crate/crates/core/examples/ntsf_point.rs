//! Certifies diffusion of the non-twist standard family at one parameter
//! pair, given as two optional arguments (default 1 1).

use annular_cap::audit::{audit, CertificateFile};
use annular_cap::diffusion::{validate_diffusion, SearchOptions};
use annular_cap::MapSpec;

fn main() -> annular_cap::Result<()> {
    let args: Vec<f64> = std::env::args()
        .skip(1)
        .filter_map(|s| s.parse().ok())
        .collect();
    let (a, b) = (
        args.first().copied().unwrap_or(1.0),
        args.get(1).copied().unwrap_or(1.0),
    );
    let map = MapSpec::ntsf(a, b)?;
    let r = validate_diffusion(&map, None, &SearchOptions::ntsf())?;
    println!("{map}: M = {}, line B = {}", r.thresholds.m, r.thresholds.b);
    println!("status {:?}, m = {:?}", r.status, r.m);
    if let Some(cert) = r.certificate {
        let rep = audit(&CertificateFile::Orbit(cert));
        println!(
            "independent recheck: {} checks, passed = {}",
            rep.checks.len(),
            rep.passed()
        );
    }
    Ok(())
}
