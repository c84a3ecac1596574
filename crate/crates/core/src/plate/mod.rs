//! Damped plate z_tt + Δ²z + d(x)z_t = 0 in a modal basis: exact semigroup,
//! energy decay traces and resolvent-norm scans.

mod modes;
mod operator;
mod resolvent;
mod semigroup;

pub use modes::{clamped_modes, clamped_root, hinged_modes, ModalBasis, Mode, PlateBc, MAX_MODES};
pub use operator::{assemble, DampingProfile, ModalState, PlateOperator};
pub use resolvent::{resolvent_norm, resolvent_scan, scan_gammas, ResolventSample, ResolventScan, GROWTH_NOTE, SINGULAR_RCOND};
pub use semigroup::{
    block_exp, decay_times, expm, simulate_decay, DecayTrace, Propagation, Propagator, MAX_TIME,
};
