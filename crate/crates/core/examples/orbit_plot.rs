//! Writes plain orbits of the three families as CSV for external plotting.

use annular_cap::diffusion::orbit;
use annular_cap::MapSpec;
use std::io::Write;

fn main() -> annular_cap::Result<()> {
    let runs = [
        ("vsf:h=id,v=lin,c=0", [0.1, -5.0], 40),
        ("ntsf:a=0.5,b=0.5", [0.3, 0.0], 2000),
        ("dsf:a=5,b=0.3", [0.1, 0.0], 2000),
    ];
    for (i, (spec, start, n)) in runs.into_iter().enumerate() {
        let map: MapSpec = spec.parse()?;
        let path = format!("orbit-{i}.csv");
        let mut out = std::io::BufWriter::new(std::fs::File::create(&path)?);
        writeln!(out, "i,x,y")?;
        for (k, p) in orbit(&map, start, n).iter().enumerate() {
            writeln!(out, "{k},{},{}", p[0], p[1])?;
        }
        println!("{spec}: {} points in {path}", n + 1);
    }
    Ok(())
}
