//! Produces a certificate, audits it, then tampers with it and audits
//! again. With a path argument, audits that file instead.

use annular_cap::audit::{audit, recheck, CertificateFile};
use annular_cap::diffusion::{validate_diffusion, SearchOptions};
use annular_cap::MapSpec;

fn main() -> annular_cap::Result<()> {
    if let Some(path) = std::env::args().nth(1) {
        let rep = recheck(path.as_ref())?;
        for c in &rep.checks {
            println!(
                "{:<5} {} {}",
                if c.passed { "ok" } else { "FAIL" },
                c.name,
                c.detail
            );
        }
        return Ok(());
    }
    let r = validate_diffusion(&MapSpec::ntsf(1.0, 1.0)?, None, &SearchOptions::ntsf())?;
    let mut cert = r.certificate.expect("(1, 1) validates");
    println!(
        "original: passed = {}",
        audit(&CertificateFile::Orbit(cert.clone())).passed()
    );
    cert.q1[1] = cert.q1[1] + 1e-7;
    let rep = audit(&CertificateFile::Orbit(cert));
    println!("tampered: passed = {}", rep.passed());
    for c in rep.failures() {
        println!("  violated: {}", c.name);
    }
    Ok(())
}
