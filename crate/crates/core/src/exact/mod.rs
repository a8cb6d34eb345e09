//! Exact finite-volume analysis over the `2^L` configurations of `[0, L-1]`
//! with a frozen zero at `L`.
//!
//! State `s` encodes `σ(x) = (s >> x) & 1`, the same layout as
//! [`Configuration::index`](crate::Configuration::index).

mod block;
mod functional;
mod generator;
mod hitting;
mod lsi;
mod semigroup;
mod spectrum;
mod tilted;

pub use block::{block_dynamics_check, block_dynamics_eigenvalue, BlockCheck, BlockSplit};
pub use functional::{
    dirichlet_bilinear, dirichlet_form, entropy, generator_quadratic_form, mean, variance,
    FunctionOnConfigs,
};
pub use generator::{Flavor, SparseGenerator, DENSE_MAX_LEN, MAX_LEN};
pub use hitting::{hitting_survival, HittingCheck};
pub use lsi::{
    leftmost_zero_law, lsi_bounds, lsi_lower_bound, lsi_upper_bound, lsi_upper_bound_shifted_log,
    test_function_direct,
    test_function_entropy, test_function_scaled_dirichlet, LowerBound, LsiBounds,
};
pub use semigroup::{expm, semigroup_apply};
pub use spectrum::{
    gap_asymptotics_check, spectral_gap, top_eigen, AsymptoticsRow, Method, SpectrumResult,
    TopEigen, GAP_EXPONENT,
};
pub use tilted::{
    activity_scgf, persistence_bound_check, persistence_exponent, phi, PersistenceCheck,
    ScgfPoint,
};
