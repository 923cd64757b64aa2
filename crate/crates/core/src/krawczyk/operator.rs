//! The Krawczyk operator
//! `K = X0 - C F(X0) + (Id - C [DF([X])]) ([X] - X0)`.
//! `K` strictly inside `[X]` proves that `F` has exactly one zero in `[X]`.

use serde::{Deserialize, Serialize};

use super::sparse::{identity_minus_product, SparseIMat};
use crate::error::{Error, Result};
use crate::ivl::{imat_apply, round, IMat, IVec, Interval, PointMat};

/// Outcome of one Krawczyk test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KrawczykCheck {
    /// `None` when `F` or `DF` could not be enclosed on the box.
    pub k: Option<IVec>,
    pub verified: bool,
}

impl KrawczykCheck {
    fn failed() -> Self {
        Self {
            k: None,
            verified: false,
        }
    }
}

/// `C * v` for a point matrix and an interval vector.
pub fn point_apply(c: &PointMat, v: &IVec) -> IVec {
    (0..c.rows())
        .map(|i| {
            c.row(i)
                .iter()
                .zip(v.iter())
                .fold(Interval::ZERO, |acc, (&cij, &vj)| acc + vj.scale(cij))
        })
        .collect()
}

/// Evaluates `K` from `F(X0)` and `[DF([X])]` already enclosed.
pub fn krawczyk_operator(
    f_x0: &IVec,
    df: &SparseIMat,
    x_box: &IVec,
    x0: &[f64],
    c: &PointMat,
) -> Result<IVec> {
    let n = x_box.len();
    if f_x0.len() != n || x0.len() != n || c.rows() != n || df.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: f_x0.len(),
        });
    }
    let cf = point_apply(c, f_x0);
    let r = identity_minus_product(c, df)?;
    let dx: IVec = x_box.iter().zip(x0).map(|(&xi, &x0i)| xi - x0i).collect();
    let rdx = imat_apply(&r, &dx)?;
    Ok((0..n)
        .map(|i| Interval::point(x0[i]) - cf[i] + rdx[i])
        .collect())
}

fn check_from<E>(
    f_x0: std::result::Result<IVec, E>,
    df: std::result::Result<SparseIMat, E>,
    x_box: &IVec,
    x0: &[f64],
    c: &PointMat,
) -> KrawczykCheck {
    let (Ok(f_x0), Ok(df)) = (f_x0, df) else {
        return KrawczykCheck::failed();
    };
    if !x_box.contains_point(x0) {
        return KrawczykCheck::failed();
    }
    match krawczyk_operator(&f_x0, &df, x_box, x0, c) {
        Ok(k) => {
            let verified = k.subset_interior(x_box).unwrap_or(false);
            KrawczykCheck {
                k: Some(k),
                verified,
            }
        }
        Err(_) => KrawczykCheck::failed(),
    }
}

/// Plain Krawczyk test for `F: R^n -> R^n`.
pub fn krawczyk_test<F, D>(f: F, df: D, x_box: &IVec, x0: &[f64], c: &PointMat) -> KrawczykCheck
where
    F: Fn(&IVec) -> Result<IVec>,
    D: Fn(&IVec) -> Result<IMat>,
{
    krawczyk_test_param(|_, x| f(x), |_, x| df(x), x_box, x0, c, Interval::ZERO)
}

/// Krawczyk test for `F(z, x)` uniformly in `z in Z`: `F(X0)` becomes
/// `F(Z, X0)` and the derivative is taken over `Z x [X]`. Success proves a
/// unique zero `x(z)` in `[X]` for every `z`, depending continuously on `z`.
pub fn krawczyk_test_param<F, D>(
    f: F,
    df: D,
    x_box: &IVec,
    x0: &[f64],
    c: &PointMat,
    z: Interval,
) -> KrawczykCheck
where
    F: Fn(Interval, &IVec) -> Result<IVec>,
    D: Fn(Interval, &IVec) -> Result<IMat>,
{
    let fx0 = f(z, &IVec::from_points(x0));
    let dfx = df(z, x_box).map(|m| SparseIMat::from_dense(&m));
    check_from(fx0, dfx, x_box, x0, c)
}

/// Same test with `F(X0)` and `[DF]` supplied by structured evaluators.
pub fn krawczyk_test_sparse(
    f_x0: Result<IVec>,
    df: Result<SparseIMat>,
    x_box: &IVec,
    x0: &[f64],
    c: &PointMat,
) -> KrawczykCheck {
    check_from(f_x0, df, x_box, x0, c)
}

/// `[x_i - r_i, x_i + r_i]` with `r_i = eps_abs + eps_rel |x_i|`, rounded outward.
pub fn inflate_candidate(x: &[f64], eps_rel: f64, eps_abs: f64) -> IVec {
    x.iter()
        .map(|&xi| {
            let r = round::add_up(eps_abs, round::mul_up(eps_rel, xi.abs()));
            Interval::around(xi, r)
        })
        .collect()
}
