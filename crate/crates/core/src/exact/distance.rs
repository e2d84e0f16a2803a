//! Distances to a reference distribution.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::compensated_sum;
use crate::structure::AbelianProjection;

/// Entries above this negative threshold are rounding noise and read as 0.
pub const NEGATIVE_CLIP: f64 = -1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Tv,
    L2,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::Tv => "tv",
            Metric::L2 => "l2",
        }
    }
}

#[inline]
fn read(x: f64) -> f64 {
    if x < 0.0 && x >= NEGATIVE_CLIP {
        0.0
    } else {
        x
    }
}

fn check_len(d: &[f64], pi: &[f64]) -> Result<()> {
    if d.len() != pi.len() {
        return Err(Error::InvalidArgument(format!(
            "distribution lengths differ: {} vs {}",
            d.len(),
            pi.len()
        )));
    }
    Ok(())
}

/// `½ Σ |d − π|`.
pub fn tv_distance(d: &[f64], pi: &[f64]) -> Result<f64> {
    check_len(d, pi)?;
    Ok(0.5 * compensated_sum(d.iter().zip(pi).map(|(&a, &b)| (read(a) - b).abs())))
}

/// `(Σ π (d/π − 1)²)^{1/2}`.
pub fn l2_distance(d: &[f64], pi: &[f64]) -> Result<f64> {
    check_len(d, pi)?;
    Ok(compensated_sum(d.iter().zip(pi).map(|(&a, &b)| {
        let r = read(a) / b - 1.0;
        b * r * r
    }))
    .sqrt())
}

/// TV distance to the uniform law on `d.len()` states.
pub fn tv_to_uniform(d: &[f64]) -> f64 {
    let u = 1.0 / d.len() as f64;
    0.5 * compensated_sum(d.iter().map(|&a| (read(a) - u).abs()))
}

/// ℓ² distance to uniform: `(m Σ d² − 1)^{1/2}`, summed as `Σ m (d − 1/m)²`
/// to avoid cancellation near equilibrium.
pub fn l2_to_uniform(d: &[f64]) -> f64 {
    let m = d.len() as f64;
    let u = 1.0 / m;
    compensated_sum(d.iter().map(|&a| {
        let e = read(a) - u;
        m * e * e
    }))
    .sqrt()
}

pub fn distance_to_uniform(d: &[f64], metric: Metric) -> f64 {
    match metric {
        Metric::Tv => tv_to_uniform(d),
        Metric::L2 => l2_to_uniform(d),
    }
}

/// Sum `d` over the fibers of the abelianization.
pub fn pushforward_abelian(d: &[f64], projection: &AbelianProjection) -> Result<Vec<f64>> {
    if d.len() != projection.group_size() {
        return Err(Error::InvalidArgument(format!(
            "distribution has {} states, group has {}",
            d.len(),
            projection.group_size()
        )));
    }
    let mut out = vec![0.0; projection.states()];
    for (x, &p) in d.iter().enumerate() {
        out[projection.image(x)] += p;
    }
    Ok(out)
}
