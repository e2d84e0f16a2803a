//! Exact evolution on enumerated groups.

mod distance;
mod heat;
mod kernel;
mod mixing;

pub use distance::{
    distance_to_uniform, l2_distance, l2_to_uniform, pushforward_abelian, tv_distance,
    tv_to_uniform, Metric, NEGATIVE_CLIP,
};
pub use heat::{
    for_each_time, heat_kernel, poisson_window, Evolver, HeatKernel, PoissonWindow, DEFAULT_TOL,
    MAX_TERMS,
};
pub use kernel::{build_kernel, build_quotient_kernel, TransitionKernel};
pub use mixing::{
    default_time_tol, mixing_time, mixing_time_with, MixingOptions, MixingTimeResult,
    DEFAULT_TIME_CAP,
};
