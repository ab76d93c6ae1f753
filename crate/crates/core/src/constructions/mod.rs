//! Submanifold factories: unit-tangent-bundle charts of conformal surfaces,
//! cylinders, plane curves from curvature and curve-cylinder compositions.

mod bipolar;
mod composition;
mod curve;

pub use bipolar::{bipolar_chart, bipolar_chart_scanned, conformality, UnitTangentChart, CONFORMAL_TOL};
pub use composition::{compose_with_curve_cylinder, cylinder_chart, CompositionData, CompositionPoint};
pub use curve::{plane_curve_from_curvature, CurvatureFn, PlaneCurve, CURVE_MAX_STEP};

#[cfg(test)]
mod tests;
