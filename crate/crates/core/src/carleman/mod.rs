//! Integrated Carleman inequalities in one space dimension: both sides of the
//! β < 0 and β = 0 estimates, the gradient lemma for β < 0, and λ-sweeps
//! that fit an empirical constant and threshold.

mod grid;
mod sides;
mod sweep;
mod table;

pub use grid::{carleman_grid, peak_time};
pub use sides::{
    carleman_sides_beta_neg, carleman_sides_beta_zero, check_conditions, lemma_2_5_check, lemma_2_5_sides,
    BoundaryCondition, CarlemanSides, EndCondition, Lemma25Sides, BC_TOL,
};
pub use sweep::{
    cell_sides, BILAP_NOTE, default_regions, fit_lambda0, lambda_sweep, sweep_fields, sweep_weight, CarlemanReport, FieldKind,
    MuSummary, SweepCell, SweepConfig, SweepRegime, VALIDATION_SLACK,
};
