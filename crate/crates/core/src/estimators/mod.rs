//! Monte Carlo and exact-counting checks.

mod collision;
mod lemmas;

pub use collision::{collision_l2, CollisionEstimate};
pub use lemmas::{
    lemma5ii_cases, verify_lemma4, verify_lemma5i, verify_lemma5i_all, verify_lemma5ii, verify_prop3,
    CountsSummary, Lemma, UniformityVerdict, Verdict, EXHAUSTIVE_ORDER, EXPONENTS,
};
