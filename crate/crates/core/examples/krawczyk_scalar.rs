//! The scalar Krawczyk check for x^2 - 4 on two boxes.

use annular_cap::ivl::{IMat, IVec, PointMat};
use annular_cap::krawczyk::krawczyk_test;
use annular_cap::Interval;

fn main() {
    for (lo, hi) in [(1.9, 2.1), (-3.0, 3.0)] {
        let x = IVec::new(vec![Interval::new(lo, hi).unwrap()]);
        let mid = 0.5 * (lo + hi);
        let c = PointMat::from_rows(&[&[if mid == 0.0 { 1.0 } else { 0.5 / mid }]]).unwrap();
        let check = krawczyk_test(
            |v: &IVec| Ok(IVec::new(vec![v[0].sqr() - 4.0])),
            |v: &IVec| Ok(IMat::from_rows(vec![vec![v[0].scale(2.0)]]).unwrap()),
            &x,
            &[mid],
            &c,
        );
        let k = check
            .k
            .map(|k| k[0].to_string())
            .unwrap_or_else(|| "-".into());
        println!("X = [{lo}, {hi}]  K = {k}  verified = {}", check.verified);
    }
}
