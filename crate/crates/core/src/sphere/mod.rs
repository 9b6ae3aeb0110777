//! Band-limited scalar and symmetric-tensor calculus on the round unit sphere.

pub mod cartesian;
mod coeffs;
mod grid;
pub mod io;
mod scalar;
mod tensor;
mod transform;

pub use coeffs::ShCoeffs;
pub use grid::{gauss_legendre, normalized_legendre, GridSpec};
pub use scalar::SphereScalarField;
pub use tensor::{assemble, tensor_norm_factor, SphereSymTensorField, TangentField};
pub use transform::{analyze, synthesize};
