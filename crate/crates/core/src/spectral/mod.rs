//! Closed forms for the abelianized product chains on Z_p^{n−1}.

mod bounds;
mod coordinate;
mod product;

pub use bounds::{
    cutoff_time, plumbing_time, theorem1_bounds, theorem1_bounds_exact, theorem1_bounds_spectral,
    theorem1_bounds_unitriangular_exact, tv_lower_bound_time, walk_gap, ActiveBranch, BoundFlags,
    BoundPath, BoundReport, CutoffTime, CutoffWalk, LowerBoundTime,
};
pub use coordinate::{coordinate_eigenvalues, coordinate_eigenvalues_for, coordinate_law, CoordinateSpectrum};
pub use product::{
    product_l2, product_tv_estimate, product_tv_exact, ProductChain, ProductMixingTime, TvEstimate,
    DEFAULT_TYPE_LIMIT,
};
