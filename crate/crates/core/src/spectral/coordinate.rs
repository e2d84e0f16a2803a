//! One coordinate of the product chain: a symmetric walk on Z_p.

use std::f64::consts::TAU;

use serde::Serialize;

use crate::error::Result;
use crate::numeric::{compensated_sum, one_minus_cos};
use crate::walk::StepLaw;

/// Eigenvalues `λ_j = Σ_c w_c cos(2π j c / p)` of a step law, with the
/// decay rates `1 − λ_j` computed without cancellation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoordinateSpectrum {
    pub p: u32,
    pub steps: StepLaw,
    pub eigenvalues: Vec<f64>,
    /// `1 − λ_j`.
    pub decay: Vec<f64>,
    /// `γ = min_{j ≠ 0} (1 − λ_j)`.
    pub gap: f64,
    /// Least `j ∈ [1, p)` attaining the gap.
    pub gap_index: usize,
}

#[inline]
fn angle(j: usize, c: u32, p: u32) -> f64 {
    // reduce j·c mod p first so the argument stays in [0, 2π)
    let r = (j as u64 * c as u64) % p as u64;
    TAU * r as f64 / p as f64
}

pub fn coordinate_eigenvalues(steps: &StepLaw) -> CoordinateSpectrum {
    let p = steps.p();
    let mut eigenvalues = Vec::with_capacity(p as usize);
    let mut decay = Vec::with_capacity(p as usize);
    for j in 0..p as usize {
        let d = compensated_sum(steps.steps().iter().map(|&(c, w)| w * one_minus_cos(angle(j, c, p))));
        decay.push(d);
        eigenvalues.push(compensated_sum(steps.steps().iter().map(|&(c, w)| w * angle(j, c, p).cos())));
    }
    let (gap_index, gap) = (1..p as usize)
        .map(|j| (j, decay[j]))
        .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
    CoordinateSpectrum {
        p,
        steps: steps.clone(),
        eigenvalues,
        decay,
        gap,
        gap_index,
    }
}

/// Eigenvalues of the uniform law on the listed steps.
pub fn coordinate_eigenvalues_for(p: u64, steps: &[i64]) -> Result<CoordinateSpectrum> {
    Ok(coordinate_eigenvalues(&StepLaw::uniform(p, steps)?))
}

impl CoordinateSpectrum {
    /// `q_s(x) = (1/p) Σ_j e^{−(1−λ_j) s} cos(2π j x / p)`; tiny negative
    /// rounding residue is clipped to 0.
    pub fn law(&self, s: f64) -> Vec<f64> {
        let p = self.p as usize;
        if s == 0.0 {
            let mut q = vec![0.0; p];
            q[0] = 1.0;
            return q;
        }
        let damp: Vec<f64> = self.decay.iter().map(|&d| (-d * s).exp()).collect();
        (0..p)
            .map(|x| {
                let v = compensated_sum((0..p).map(|j| damp[j] * angle(j, x as u32, self.p).cos()));
                (v / p as f64).max(0.0)
            })
            .collect()
    }

    /// `Σ_{j ≥ 1} e^{−2(1−λ_j) s}`: squared ℓ² distance of one coordinate.
    pub fn l2_squared(&self, s: f64) -> f64 {
        compensated_sum(self.decay[1..].iter().map(|&d| (-2.0 * d * s).exp()))
    }
}

/// Exact law at rate-s time of one coordinate; see [`CoordinateSpectrum::law`].
pub fn coordinate_law(steps: &StepLaw, s: f64) -> Vec<f64> {
    coordinate_eigenvalues(steps).law(s)
}
