pub mod constructions;
pub mod error;
pub mod immersion;
pub mod jets;
pub mod linalg;
pub mod minimal;
pub mod nullity;
pub mod osculating;
mod scalar;
pub mod verify;

pub use error::GeometryError;
pub use scalar::Scalar;

/// Double-precision jet.
pub type Jet64 = jets::Jet<f64>;
/// Double-precision chart.
pub type Chart64 = immersion::Chart<f64>;
/// Double-precision derivative tower.
pub type Tower64 = immersion::DerivativeTower<f64>;
/// Double-precision fundamental forms.
pub type Forms64 = immersion::FundamentalForms<f64>;
/// Double-precision distribution.
pub type Distribution64 = nullity::Distribution<f64>;
/// Double-precision dense matrix.
pub type Matrix64 = linalg::Matrix<f64>;
