// `!(x > 0.0)` is deliberate throughout: NaN must fail the test.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod audit;
pub mod cli;
pub mod diffusion;
pub mod dsf;
pub mod error;
pub mod ivl;
pub mod krawczyk;
pub mod maps;
pub mod sweep;

pub use error::{Error, Result};
pub use ivl::{IMat, IVec, Interval};
pub use maps::MapSpec;
