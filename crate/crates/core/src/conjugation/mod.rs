//! The operator P = α∂s + β∂ss + Δ², its conjugate θP(θ⁻¹·) and the split
//! into P₁, P₂, Pᵣ, P₃, P₄.

pub mod decompose;
pub mod params;
pub mod points;
pub mod verify;

pub use decompose::{
    conjugated_expansion, decompose, decomposition, conjugated_apply, DecompCoefficients,
    DecompositionResult, OVERFLOW_BOUND,
};
pub use params::{OperatorParams, Regime};
pub use points::{apply_p, field_point, theta_times_field_point, ZPoint};
pub use verify::{interior_pair, symmetry_of, verify_master_identity, verify_symmetry, SymmetryReport};
