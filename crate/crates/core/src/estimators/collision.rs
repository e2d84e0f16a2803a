//! Collision estimator of the squared ℓ² distance: for independent copies
//! `X_t, X'_t`, `|G|·P(X_t = X'_t) − 1 = d_ℓ²(t)²`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::rng::{blocks, stream, DEFAULT_BLOCK};
use crate::walk::{simulate, JumpDistribution, Storage};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CollisionEstimate {
    pub t: f64,
    pub pairs: usize,
    pub collisions: usize,
    /// `|G| · (collisions / pairs) − 1`.
    pub estimate: f64,
    /// `|G| · sqrt(f(1 − f)/N)` with `f` the collision fraction.
    pub std_error: f64,
}

fn group_order_f64<G: FiniteGroup>(g: &G) -> f64 {
    match g.order() {
        Some(m) => m as f64,
        None => g.ln_order().exp(),
    }
}

/// Simulate `pairs` independent pairs up to time `t`. Work is split into
/// seeded blocks, so the result depends only on `seed`.
pub fn collision_l2<G: FiniteGroup>(
    jd: &JumpDistribution<G>,
    t: f64,
    pairs: usize,
    seed: u64,
) -> Result<CollisionEstimate> {
    if pairs == 0 {
        return Err(Error::InvalidArgument("need at least one pair".into()));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("time must be finite and >= 0, got {t}")));
    }
    let order = group_order_f64(jd.group());
    if t == 0.0 {
        return Ok(CollisionEstimate {
            t,
            pairs,
            collisions: pairs,
            estimate: order - 1.0,
            std_error: 0.0,
        });
    }
    let collisions = blocks(pairs, DEFAULT_BLOCK)
        .into_par_iter()
        .map(|(b, len)| -> Result<usize> {
            let mut rng = stream(seed, b);
            let mut hits = 0;
            for _ in 0..len {
                let x = simulate(jd, t, Storage::StateOnly, &mut rng)?.state;
                let y = simulate(jd, t, Storage::StateOnly, &mut rng)?.state;
                hits += usize::from(x == y);
            }
            Ok(hits)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    let f = collisions as f64 / pairs as f64;
    Ok(CollisionEstimate {
        t,
        pairs,
        collisions,
        estimate: order * f - 1.0,
        std_error: order * (f * (1.0 - f) / pairs as f64).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walk::build_superclass_walk;

    #[test]
    fn time_zero_is_exact() {
        let jd = build_superclass_walk(3, 3).unwrap();
        let e = collision_l2(&jd, 0.0, 10, 1).unwrap();
        assert_eq!(e.estimate, 26.0);
        assert_eq!(e.std_error, 0.0);
        assert!(collision_l2(&jd, 1.0, 0, 1).is_err());
    }

    #[test]
    fn reproducible_and_near_zero_at_equilibrium() {
        let jd = build_superclass_walk(3, 2).unwrap();
        let a = collision_l2(&jd, 60.0, 20_000, 5).unwrap();
        let b = collision_l2(&jd, 60.0, 20_000, 5).unwrap();
        assert_eq!(a, b);
        assert!(a.estimate >= -1.0);
        assert!(a.estimate.abs() <= 4.0 * a.std_error, "{a:?}");
    }
}
