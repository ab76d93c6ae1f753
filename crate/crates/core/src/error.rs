use thiserror::Error;

use crate::jets::JetError;

/// Failures of the pointwise geometry and the constructions built on it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error("point {point:?} lies outside the chart domain")]
    OutsideDomain { point: Vec<f64> },
    #[error("sphere chart left the unit sphere: |Φ| = {norm}")]
    SphereNormalization { norm: f64 },
    #[error("singular point {point:?}: metric eigenvalue ratio {ratio:e}")]
    SingularPoint { point: Vec<f64>, ratio: f64 },
    #[error("derivative tower of order {got}, need at least {needed}")]
    InsufficientOrder { needed: usize, got: usize },
    #[error("chart produced {got} coordinates, ambient space needs {expected}")]
    WrongOutputDim { expected: usize, got: usize },
    #[error("vector is not normal to the immersion (residual {residual:e})")]
    NotNormal { residual: f64 },
    #[error("distribution fields are not pointwise independent at {point:?}")]
    DegenerateDistribution { point: Vec<f64> },
    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("value {value} leaves the admissible range [{min}, {max}]")]
    RangeViolation { value: f64, min: f64, max: f64 },
    #[error("numerical integration failed: {0}")]
    Integration(String),
}

pub type Result<T, E = GeometryError> = std::result::Result<T, E>;
