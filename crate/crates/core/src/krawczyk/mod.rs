//! Krawczyk operator, parallel shooting, and validation certificates.

mod band;
mod certificate;
mod operator;
mod shooting;
mod sparse;

pub use band::BandLu;
pub use certificate::{endpoint_y, find_box, validate, Certificate, TargetLine, INFLATION_LADDER};
pub use operator::{
    inflate_candidate, krawczyk_operator, krawczyk_test, krawczyk_test_param, krawczyk_test_sparse,
    point_apply, KrawczykCheck,
};
pub use shooting::{eval_df, eval_f, Anchor, ShootingProblem, StartDirection};
pub use sparse::{identity_minus_product, SparseIMat};
