//! Interval arithmetic with outward rounding.

mod elementary;
mod interval;
mod matrix;
pub mod round;
mod vector;

pub use elementary::{elem, ElemFn, HALF_PI, LIBM_ULPS, PI, TWO_PI};
pub use interval::{binary, BinOp, Interval};
pub use matrix::{approx_inverse, dot, imat_apply, imat_mul, inverse_2x2, DenseLu, IMat, PointMat};
pub use vector::IVec;
