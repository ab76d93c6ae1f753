//! Immersion charts into `ℝ^m` or `S^m ⊂ ℝ^{m+1}` and their pointwise
//! extrinsic geometry.

mod chart;
pub mod export;
mod forms;
pub mod stock;

pub use chart::{evaluate_tower, AmbientSpace, Chart, DerivativeTower, Evaluator};
pub(crate) use chart::evaluate_tower_unchecked;
pub use forms::{
    check_regular, christoffel, christoffel_jets, fundamental_forms, intrinsic_gaussian_curvature,
    nullity_membership_residual, relative_nullity, shape_operator, Christoffel,
    FundamentalForms, NullityData, NULLITY_REL_TOL, SINGULAR_RATIO,
};
