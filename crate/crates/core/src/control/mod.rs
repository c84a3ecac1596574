//! Null control of y_t + Δ²y = χ_ω u by the penalized Hilbert Uniqueness
//! Method in a modal basis.

mod hum;
mod problem;

pub use hum::{
    conjugate_residual, duality_defect, gramian, gramian_apply, hum_solve, observability_proxy, observed_energy,
    symmetry_defect, HumResult,
};
pub use problem::{adjoint_solve, forward_solve, ControlConfig, ControlProblem, ControlSamples, TimeGrid};
