//! Rotational horseshoe for the dissipative standard family, at a point
//! and on a small parameter box.

use annular_cap::dsf::{validate_dsf, DsfOptions, DsfOutcome};
use annular_cap::Interval;

fn main() -> annular_cap::Result<()> {
    let cases = [
        (Interval::point(5.0), Interval::point(0.3)),
        (Interval::new(4.5, 4.51)?, Interval::new(0.3, 0.304)?),
    ];
    for (a, b) in cases {
        match validate_dsf(a, b, &DsfOptions::default())? {
            DsfOutcome::Chaos(cc) => {
                let c = &cc.case;
                println!(
                    "a = {a}, b = {b}: chaos, kappa = {}, N = {}, B = {}",
                    c.kappa, c.n, c.b_line
                );
                for cert in &cc.certificates {
                    println!(
                        "  branch m = {}, endpoint y {}",
                        cert.m,
                        cert.endpoint_enclosure.unwrap()
                    );
                }
            }
            DsfOutcome::Failed {
                reason,
                kappas_tried,
            } => {
                println!(
                    "a = {a}, b = {b}: failed ({reason:?}) after {kappas_tried} rotation numbers"
                );
            }
        }
    }
    Ok(())
}
