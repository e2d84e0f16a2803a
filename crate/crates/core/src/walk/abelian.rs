//! Abelianized descriptions of walks on U_n(p).
//!
//! Conjugation acts trivially on the superdiagonal, so a walk whose classes
//! are all of the form `Cl(I + c E_{i,i+1})` projects to a product chain on
//! Z_p^{n−1}: pick a coordinate uniformly, then add a step from a symmetric
//! law on Z_p \ {0}.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::Serialize;

use super::distribution::JumpDistribution;
use crate::error::{Error, Result};
use crate::group::UnitriangularGroup;
use crate::structure::{ratio_to_f64, Weight};

/// A symmetric step law on Z_p \ {0}.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepLaw {
    p: u32,
    /// `(step, probability)`, steps increasing and distinct.
    steps: Vec<(u32, f64)>,
}

impl StepLaw {
    /// Equal weight on each listed step; steps are reduced mod p and
    /// repeated residues accumulate weight.
    pub fn uniform(p: u64, steps: &[i64]) -> Result<Self> {
        let each = Weight::new(1, steps.len().max(1) as i128);
        Self::from_exact(p, steps.iter().map(|&c| (c, each)).collect())
    }

    /// Steps with exact weights summing to 1.
    pub fn from_exact(p: u64, steps: Vec<(i64, Weight)>) -> Result<Self> {
        if p < 2 || p > u32::MAX as u64 {
            return Err(Error::InvalidArgument(format!("modulus {p} out of range")));
        }
        if steps.is_empty() {
            return Err(Error::InvalidArgument("empty step set".into()));
        }
        let mut acc: BTreeMap<u32, Weight> = BTreeMap::new();
        for (c, w) in steps {
            let r = c.rem_euclid(p as i64) as u32;
            if r == 0 {
                return Err(Error::InvalidArgument(format!("step {c} is 0 mod {p}")));
            }
            *acc.entry(r).or_insert_with(Weight::zero) += w;
        }
        let total = acc.values().fold(Weight::zero(), |a, b| a + b);
        if total != Weight::from_integer(1) {
            return Err(Error::InvalidArgument(format!("step weights sum to {total}")));
        }
        for (&c, w) in &acc {
            let mirror = (p as u32 - c) % p as u32;
            if acc.get(&mirror) != Some(w) {
                return Err(Error::InvalidArgument(format!(
                    "step law is not symmetric: weight of {c} differs from weight of {mirror}"
                )));
            }
        }
        Ok(StepLaw {
            p: p as u32,
            steps: acc.into_iter().map(|(c, w)| (c, ratio_to_f64(&w))).collect(),
        })
    }

    /// Floating weights; symmetry is checked with relative tolerance 1e-12.
    pub fn from_weights(p: u64, steps: &[(i64, f64)]) -> Result<Self> {
        if p < 2 || p > u32::MAX as u64 {
            return Err(Error::InvalidArgument(format!("modulus {p} out of range")));
        }
        let mut acc: BTreeMap<u32, f64> = BTreeMap::new();
        for &(c, w) in steps {
            let r = c.rem_euclid(p as i64) as u32;
            if r == 0 || !(w > 0.0) {
                return Err(Error::InvalidArgument(format!("bad step ({c}, {w})")));
            }
            *acc.entry(r).or_insert(0.0) += w;
        }
        let total: f64 = acc.values().sum();
        if acc.is_empty() || (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("step weights sum to {total}")));
        }
        for (&c, &w) in &acc {
            let mirror = (p as u32 - c) % p as u32;
            match acc.get(&mirror) {
                Some(&wm) if (wm - w).abs() <= 1e-12 * w => {}
                _ => {
                    return Err(Error::InvalidArgument(format!(
                        "step law is not symmetric at {c}"
                    )))
                }
            }
        }
        Ok(StepLaw {
            p: p as u32,
            steps: acc.into_iter().collect(),
        })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn steps(&self) -> &[(u32, f64)] {
        &self.steps
    }

    /// The residues with positive weight.
    pub fn support(&self) -> Vec<u32> {
        self.steps.iter().map(|&(c, _)| c).collect()
    }
}

/// A product chain on Z_p^{n−1} with total jump rate 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AbelianWalkSpec {
    /// `n − 1`.
    pub coordinates: usize,
    pub p: u32,
    pub steps: StepLaw,
}

impl AbelianWalkSpec {
    pub fn new(coordinates: usize, steps: StepLaw) -> Result<Self> {
        if coordinates == 0 {
            return Err(Error::InvalidArgument("need at least one coordinate".into()));
        }
        Ok(AbelianWalkSpec {
            coordinates,
            p: steps.p(),
            steps,
        })
    }

    /// Rate at which each coordinate moves.
    pub fn coordinate_rate(&self) -> f64 {
        1.0 / self.coordinates as f64
    }

    /// Matrix dimension n.
    pub fn n(&self) -> usize {
        self.coordinates + 1
    }
}

/// The product chain seen by the superdiagonal.
pub fn project_walk(jd: &JumpDistribution<UnitriangularGroup>) -> Result<AbelianWalkSpec> {
    let group = jd.group();
    let coords = group.dim() - 1;
    let mut per_coord: Vec<BTreeMap<u32, Weight>> = vec![BTreeMap::new(); coords];
    for class in jd.decomposition().classes() {
        let Some((i, c)) = class.representative.as_elementary() else {
            return Err(Error::UnsupportedProjection(format!(
                "class representative {:?} is not of the form I + c E_(i,i+1)",
                class.representative.entries()
            )));
        };
        *per_coord[i].entry(c).or_insert_with(Weight::zero) += class.weight;
    }
    let share = Weight::new(1, coords as i128);
    let first = &per_coord[0];
    for (i, law) in per_coord.iter().enumerate() {
        let total = law.values().fold(Weight::zero(), |a, b| a + b);
        if total != share {
            return Err(Error::UnsupportedProjection(format!(
                "coordinate {i} carries weight {total}, not {share}"
            )));
        }
        if law != first {
            return Err(Error::UnsupportedProjection(format!(
                "coordinate {i} has a different step law from coordinate 0"
            )));
        }
    }
    let steps = first
        .iter()
        .map(|(&c, &w)| (c as i64, w / share))
        .collect();
    AbelianWalkSpec::new(coords, StepLaw::from_exact(group.p() as u64, steps)?)
}
