//! Lifted annulus maps, their derivatives, and the constants the
//! diffusion and chaos criteria are phrased in.

mod eval;
mod fixed;
mod riemann;
mod spec;
mod thresholds;

pub use eval::{det, eval_map, jacobian, sin_cos_2pi, IJac, IPoint};
pub use fixed::{
    box_chain_length, dsf_fixed_pair, kappa_range, rotating_point, rotating_point_slope,
    FixedPointPair,
};
pub use riemann::{riemann_enclosure, zero_mean_constant};
pub use spec::{parse_interval, HChoice, MapSpec, VChoice};
pub use thresholds::{
    diffusion_threshold, dsf_b, nontwist_threshold, ntsf_threshold, twist_threshold,
    vertical_bound, Thresholds, NTSF_LINE_MARGIN, VSF_LINE,
};
