//! Structural algorithms on enumerated groups.

mod abelian;
mod classes;
mod series;
mod subgroup;
mod support;

pub use abelian::{
    abelianize_unitriangular, superdiagonal_coords, superdiagonal_index, AbelianImage,
    AbelianProjection,
};
pub use classes::{conjugacy_class, conjugacy_classes, ClassMembers, ConjugacyClass};
pub use series::{derived_subgroup, lower_central_series, CosetMap, LowerCentralSeries};
pub use subgroup::{closure, commutator_subgroup, greedy_generators, is_normal, normal_closure, Subgroup};
pub use support::{
    check_generates, decompose_support, parse_jump_law, parse_weight, ratio_to_f64, ClassWeight,
    JumpLawRecord, SupportDecomposition, Weight, WeightText, WEIGHT_SUM_TOLERANCE,
};
