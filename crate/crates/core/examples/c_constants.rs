//! Encloses the constant that makes each kick profile zero-mean and
//! compares it with the value stored in the catalog.

use annular_cap::diffusion::vsf_catalog;
use annular_cap::maps::{riemann_enclosure, zero_mean_constant, HChoice};

fn main() -> annular_cap::Result<()> {
    for c in vsf_catalog()
        .into_iter()
        .filter(|c| c.h == HChoice::Identity)
    {
        let (enc, k) = zero_mean_constant(c.v, 1e-4)?;
        println!("{:<6} c in {enc}  ({k} cells)  stored {}", c.v.name(), c.c);
        // With the stored constant the mean should straddle zero.
        let mean = riemann_enclosure(c.v, k)? + c.c;
        println!("       mean with stored c: {mean}");
    }
    Ok(())
}
