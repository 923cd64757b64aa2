mod common;

use annular_cap::ivl::{IMat, IVec, PointMat};
use annular_cap::krawczyk::{
    krawczyk_test, krawczyk_test_param, validate, ShootingProblem, StartDirection, TargetLine,
};
use annular_cap::{Interval, MapSpec};
use common::{rational, scalar_example_exact};
use proptest::prelude::*;

fn scalar(lo: f64, hi: f64) -> annular_cap::krawczyk::KrawczykCheck {
    let x = IVec::new(vec![Interval::new(lo, hi).unwrap()]);
    let c = PointMat::from_rows(&[&[0.25]]).unwrap();
    krawczyk_test(
        |v: &IVec| Ok(IVec::new(vec![v[0].sqr() - 4.0])),
        |v: &IVec| Ok(IMat::from_rows(vec![vec![v[0].scale(2.0)]]).unwrap()),
        &x,
        &[2.0],
        &c,
    )
}

#[test]
fn worked_example_contains_exact_image() {
    let check = scalar(1.9, 2.1);
    assert!(check.verified);
    let k = check.k.unwrap()[0];
    let (lo, hi) = scalar_example_exact(1.9, 2.1);
    assert!(rational(k.lo()) <= lo && hi <= rational(k.hi()));
    // Outward rounding costs at most a few ulps.
    assert!(k.lo() >= 1.995 - 4.0 * f64::EPSILON && k.hi() <= 2.005 + 4.0 * f64::EPSILON);
}

#[test]
fn box_with_two_roots_fails() {
    assert!(!scalar(-3.0, 3.0).verified);
}

#[test]
fn box_without_root_fails() {
    let x = IVec::new(vec![Interval::new(2.5, 2.7).unwrap()]);
    let c = PointMat::from_rows(&[&[1.0 / 5.2]]).unwrap();
    let check = krawczyk_test(
        |v: &IVec| Ok(IVec::new(vec![v[0].sqr() - 4.0])),
        |v: &IVec| Ok(IMat::from_rows(vec![vec![v[0].scale(2.0)]]).unwrap()),
        &x,
        &[2.6],
        &c,
    );
    assert!(!check.verified);
}

proptest! {
    /// For an affine system the unique zero is known exactly; a verified
    /// box must contain it.
    #[test]
    fn affine_zero_is_enclosed(
        m in prop::array::uniform4(-3.0..3.0f64),
        s in prop::array::uniform2(-5.0..5.0f64),
        shift in prop::array::uniform2(-1e-3..1e-3f64),
    ) {
        let det = m[0] * m[3] - m[1] * m[2];
        prop_assume!(det.abs() > 0.1);
        let a = [[m[0], m[1]], [m[2], m[3]]];
        let f = move |x: &IVec| {
            Ok(IVec::new(vec![
                x[0].scale(a[0][0]) + x[1].scale(a[0][1]) - s[0],
                x[0].scale(a[1][0]) + x[1].scale(a[1][1]) - s[1],
            ]))
        };
        let df = move |_: &IVec| Ok(IMat::from_points(&PointMat::from_rows(&[&a[0], &a[1]]).unwrap()));
        let sol = [(s[0] * a[1][1] - s[1] * a[0][1]) / det, (a[0][0] * s[1] - a[1][0] * s[0]) / det];
        let x0 = [sol[0] + shift[0], sol[1] + shift[1]];
        let xbox = IVec::new(x0.iter().map(|&v| Interval::around(v, 1e-2)).collect());
        let c = PointMat::from_rows(&[&[a[1][1] / det, -a[0][1] / det], &[-a[1][0] / det, a[0][0] / det]]).unwrap();
        let check = krawczyk_test(f, df, &xbox, &x0, &c);
        prop_assert!(check.verified);
        let k = check.k.unwrap();
        // Exact solution via rationals.
        let (r00, r01, r10, r11) = (rational(a[0][0]), rational(a[0][1]), rational(a[1][0]), rational(a[1][1]));
        let (s0, s1) = (rational(s[0]), rational(s[1]));
        let d = &r00 * &r11 - &r01 * &r10;
        let exact = [(&s0 * &r11 - &s1 * &r01) / &d, (&r00 * &s1 - &r10 * &s0) / &d];
        for i in 0..2 {
            prop_assert!(common::contains_rational(&k[i], &exact[i]));
        }
    }
}

#[test]
fn parameter_family_of_roots() {
    // x^2 = 4 + z for z in [-0.01, 0.01]: the box must hold every root.
    let z = Interval::new(-0.01, 0.01).unwrap();
    let x = IVec::new(vec![Interval::new(1.99, 2.01).unwrap()]);
    let c = PointMat::from_rows(&[&[0.25]]).unwrap();
    let check = krawczyk_test_param(
        |z, v: &IVec| Ok(IVec::new(vec![v[0].sqr() - 4.0 - z])),
        |_, v: &IVec| Ok(IMat::from_rows(vec![vec![v[0].scale(2.0)]]).unwrap()),
        &x,
        &[2.0],
        &c,
        z,
    );
    assert!(check.verified);
    let k = check.k.unwrap()[0];
    assert!(k.contains(3.99f64.sqrt()) && k.contains(4.01f64.sqrt()));
}

fn ntsf_orbit(m: usize) -> (MapSpec, Vec<[f64; 2]>) {
    let map: MapSpec = "ntsf:a=1,b=1".parse().unwrap();
    let mut orbit = vec![[0.3, -1.0]];
    for _ in 0..m {
        let p = *orbit.last().unwrap();
        orbit.push(map.eval_f64(p));
    }
    (map, orbit)
}

#[test]
fn shooting_residual_contains_zero_on_validated_box() {
    let (map, orbit) = ntsf_orbit(6);
    let q0 = [Interval::point(0.3), Interval::point(-1.0)];
    let prob = ShootingProblem::from_orbit(
        map,
        q0,
        StartDirection::Fixed { v: [1.0, 0.0] },
        0.0,
        &orbit,
        [0.0, 1.0],
        None,
    )
    .unwrap();
    let cert = validate(&prob, TargetLine::above(-100.0)).unwrap();
    assert!(cert.verified);
    let x = cert.x_enclosure.unwrap();
    let f = prob.eval_f(&x, Interval::ZERO).unwrap();
    assert!(f.contains_zero());
    // The banded and dense preconditioners agree on this problem.
    let cb = prob.preconditioner(&prob.candidate, 0.0).unwrap();
    let cd = prob.preconditioner_dense(&prob.candidate, 0.0).unwrap();
    for i in 0..cb.rows() {
        for j in 0..cb.cols() {
            assert!((cb[(i, j)] - cd[(i, j)]).abs() <= 1e-9 * (1.0 + cd[(i, j)].abs()));
        }
    }
}

#[test]
fn shooting_needs_two_steps() {
    let (map, orbit) = ntsf_orbit(1);
    let q0 = [Interval::point(0.3), Interval::point(-1.0)];
    assert!(ShootingProblem::from_orbit(
        map,
        q0,
        StartDirection::Fixed { v: [1.0, 0.0] },
        0.0,
        &orbit,
        [1.0, 0.0],
        None
    )
    .is_err());
}
