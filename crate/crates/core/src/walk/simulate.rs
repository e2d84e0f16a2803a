//! Continuous-time trajectories: `X_t = Π_{i ≤ N(t)} U_i⁻¹ s_{σ_i} U_i`.

use rand::Rng;
use rand_distr::Exp1;

use super::distribution::JumpDistribution;
use crate::error::{Error, Result};
use crate::group::FiniteGroup;

/// What a trajectory keeps besides its final state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Storage {
    #[default]
    StateOnly,
    Full,
}

/// One jump of a stored trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpRecord<E> {
    pub time: f64,
    /// `σ_i`.
    pub class: usize,
    /// `U_i`.
    pub conjugator: E,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WalkTrajectory<E> {
    pub horizon: f64,
    pub jump_count: usize,
    pub state: E,
    pub jumps: Option<Vec<JumpRecord<E>>>,
}

/// Run the walk from the identity up to time `t`.
pub fn simulate<G: FiniteGroup, R: Rng + ?Sized>(
    jd: &JumpDistribution<G>,
    t: f64,
    storage: Storage,
    rng: &mut R,
) -> Result<WalkTrajectory<G::Elem>> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("time must be finite and >= 0, got {t}")));
    }
    let group = jd.group();
    let mut state = group.identity();
    let mut jumps = matches!(storage, Storage::Full).then(Vec::new);
    let mut clock = 0.0;
    let mut count = 0usize;
    loop {
        let gap: f64 = rng.sample(Exp1);
        clock += gap;
        if clock > t {
            break;
        }
        let (class, u) = jd.sample_parts(rng);
        group.mul_assign_conjugate(&mut state, jd.representative(class), &u);
        count += 1;
        if let Some(list) = jumps.as_mut() {
            list.push(JumpRecord {
                time: clock,
                class,
                conjugator: u,
            });
        }
    }
    Ok(WalkTrajectory {
        horizon: t,
        jump_count: count,
        state,
        jumps,
    })
}

impl<E: Clone> WalkTrajectory<E> {
    /// Recompute the state from stored jumps.
    pub fn replay<G: FiniteGroup<Elem = E>>(&self, jd: &JumpDistribution<G>) -> Option<E> {
        let jumps = self.jumps.as_ref()?;
        let g = jd.group();
        Some(jumps.iter().fold(g.identity(), |x, j| {
            g.multiply(&x, &g.conjugate(jd.representative(j.class), &j.conjugator))
        }))
    }
}
