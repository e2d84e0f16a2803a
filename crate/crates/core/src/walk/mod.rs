//! Jump laws, samplers and trajectories.

mod abelian;
mod distribution;
mod simulate;

pub use abelian::{project_walk, AbelianWalkSpec, StepLaw};
pub use distribution::{
    build_nestoridi_walk, build_nestoridi_walk_with_magnitude, build_superclass_walk,
    JumpDistribution, NestoridiParams, WalkKind,
};
pub use simulate::{simulate, JumpRecord, Storage, WalkTrajectory};
