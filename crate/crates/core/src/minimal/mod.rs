//! Minimal surfaces from Weierstrass data, their orthogonal sums and
//! rotational surfaces.

mod rotational;
mod weierstrass;

pub use rotational::{
    delaunay_profile, rotational_surface, DelaunayParams, DelaunayProfile, ProfileFn,
    RotationLayout,
};
pub use weierstrass::{
    orthogonal_sum_hat, weierstrass_chart, HolomorphicSeries, MinimalSurfaceChart,
    WeierstrassData, SERIES_TERMS, TAIL_TOL,
};
