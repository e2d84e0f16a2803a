//! Simulation and exact analysis of conjugacy-invariant continuous-time
//! random walks on finite nilpotent groups.
//!
//! The crate is organised bottom-up:
//!
//! * [`group`]: arithmetic in U_n(p) and in Cayley-table groups.
//! * [`structure`]: conjugacy classes, the lower central series, coset
//!   representatives, the abelianization map and support decomposition.
//! * [`walk`]: the two superclass walks on U_n(p), user-defined laws,
//!   jump sampling and trajectory simulation.
//! * [`exact`]: uniformization of the heat kernel on enumerated groups,
//!   distances to uniform and mixing-time bisection.
//! * [`spectral`]: closed forms for the abelianized product chains on
//!   Z_p^{n-1}, cutoff times and the comparison bounds.
//! * [`estimators`]: collision-based ℓ² estimation and exact verification
//!   of the group-theoretic lemmas the comparison relies on.

pub mod error;
pub mod estimators;
pub mod exact;
pub mod group;
pub mod numeric;
pub mod rng;
pub mod spectral;
pub mod structure;
pub mod walk;

pub use error::{Error, Result};
