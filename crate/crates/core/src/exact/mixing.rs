//! Mixing times by doubling and bisection.
//!
//! Both distances are non-increasing in t, so `{t : d(t) ≤ ε}` is a ray and
//! a bracket `d(lower) > ε ≥ d(upper)` can be shrunk by bisection.

use serde::Serialize;

use super::distance::{distance_to_uniform, Metric};
use super::heat::{Evolver, DEFAULT_TOL};
use super::kernel::TransitionKernel;
use crate::error::{Error, Result};

/// Give up doubling past this time.
pub const DEFAULT_TIME_CAP: f64 = 1e5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixingOptions {
    /// Bracket width; `None` means `max(1e-6 · t_upper, 1e-4)`.
    pub time_tol: Option<f64>,
    /// Uniformization truncation per evaluation.
    pub tol: f64,
    pub time_cap: f64,
}

impl Default for MixingOptions {
    fn default() -> Self {
        MixingOptions {
            time_tol: None,
            tol: DEFAULT_TOL,
            time_cap: DEFAULT_TIME_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixingTimeResult {
    pub metric: Metric,
    pub epsilon: f64,
    /// Upper end of the bracket: a time at which `d ≤ ε` is certified.
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
    pub time_tol: f64,
    pub distance_at_lower: f64,
    pub distance_at_upper: f64,
    /// Distance evaluations performed.
    pub evaluations: usize,
    /// Largest ℓ¹ mass dropped by truncation in any evaluation.
    pub dropped_mass: f64,
}

pub fn default_time_tol(upper: f64) -> f64 {
    (1e-6 * upper).max(1e-4)
}

pub fn mixing_time(
    kernel: &TransitionKernel,
    epsilon: f64,
    metric: Metric,
    time_tol: Option<f64>,
) -> Result<MixingTimeResult> {
    mixing_time_with(
        kernel,
        epsilon,
        metric,
        MixingOptions {
            time_tol,
            ..MixingOptions::default()
        },
    )
}

pub fn mixing_time_with(
    kernel: &TransitionKernel,
    epsilon: f64,
    metric: Metric,
    opts: MixingOptions,
) -> Result<MixingTimeResult> {
    if !(epsilon > 0.0) || (metric == Metric::Tv && epsilon >= 1.0) || !epsilon.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "level must lie in (0, 1) for TV and (0, ∞) for ℓ², got {epsilon}"
        )));
    }
    if let Some(tt) = opts.time_tol {
        if !(tt > 0.0) {
            return Err(Error::InvalidArgument(format!("time_tol must be positive, got {tt}")));
        }
    }
    let dist = |ev: &Evolver| distance_to_uniform(ev.distribution(), metric);
    let mut low = Evolver::new(kernel, opts.tol);
    let d0 = dist(&low);
    let mut result = MixingTimeResult {
        metric,
        epsilon,
        estimate: 0.0,
        lower: 0.0,
        upper: 0.0,
        time_tol: opts.time_tol.unwrap_or(1e-4),
        distance_at_lower: d0,
        distance_at_upper: d0,
        evaluations: 1,
        dropped_mass: 0.0,
    };
    if d0 <= epsilon {
        return Ok(result);
    }

    let mut d_low = d0;
    let mut upper = 1.0;
    let (mut high_time, mut d_high) = loop {
        if upper > opts.time_cap {
            return Err(Error::Divergence { cap: opts.time_cap });
        }
        let mut trial = low.clone();
        trial.advance_to(upper)?;
        result.evaluations += 1;
        result.dropped_mass = result.dropped_mass.max(trial.dropped_mass());
        let d = dist(&trial);
        if d <= epsilon {
            break (upper, d);
        }
        low = trial;
        d_low = d;
        upper *= 2.0;
    };

    let time_tol = opts.time_tol.unwrap_or_else(|| default_time_tol(high_time));
    while high_time - low.time() > time_tol {
        let mid = 0.5 * (low.time() + high_time);
        let mut trial = low.clone();
        trial.advance_to(mid)?;
        result.evaluations += 1;
        result.dropped_mass = result.dropped_mass.max(trial.dropped_mass());
        let d = dist(&trial);
        if d > epsilon {
            low = trial;
            d_low = d;
        } else {
            high_time = mid;
            d_high = d;
        }
    }
    result.lower = low.time();
    result.upper = high_time;
    result.estimate = high_time;
    result.time_tol = time_tol;
    result.distance_at_lower = d_low;
    result.distance_at_upper = d_high;
    Ok(result)
}
