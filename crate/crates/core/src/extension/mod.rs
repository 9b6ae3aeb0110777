//! Explicit linearized static vacuum extension of near-round Bartnik data.

mod bdot;
mod bump;
mod field;
pub mod io;
mod mass;
mod modes;
mod residual;

pub use bdot::{bdot_conformal, bdot_vector};
pub use bump::{BumpProfile, BUMP_INNER, BUMP_OUTER};
pub use field::{FieldValues, LinearizedExtension};
pub use mass::{adm_mass_closed_form, adm_mass_flux, ConformalPointMass, Flat, FluxMass, MetricPerturbation};
pub use modes::{apply_mode, back_substitution_residual, solve_mode, solve_modes, ModeSolution};
pub use residual::{
    boundary_geometry, boundary_residual, convexity_check, convexity_points, fibonacci_directions,
    r2_hessian_min_eigenvalue, sample_points, static_operator, static_residual, BoundaryResidual,
    ConvexityReport, CurvatureMethod, ResidualStats, DEFAULT_FD_STEP, STATIC_SAMPLE_RADII,
};
