//! Numerical laboratory for Carleman estimates of `P = a d_s + b d_ss + Δ²`.
//!
//! * [`fields`]: domains, Gauss–Legendre grids, manufactured test fields with
//!   exact derivatives and a finite-difference oracle.
//! * [`weights`]: the spatial function η and the three weight families.
//! * [`conjugation`]: the conjugated operator and its decomposition.
//! * [`energies`]: low-order energies, coefficient budgets, fluxes and the
//!   exact-identity catalog.
//! * [`carleman`]: integrated inequality harness and λ-sweeps.
//! * [`plate`]: modal damped plate, decay and resolvent scans.
//! * [`control`]: HUM null control of the fourth-order parabolic equation.
//! * [`suite`]: the acceptance stages with configurable thresholds.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod carleman;
pub mod conjugation;
pub mod control;
pub mod energies;
pub mod error;
pub mod fields;
pub mod jet;
pub mod numeric;
pub mod par;
pub mod plate;
pub mod rect;
pub mod suite;
pub mod weights;

pub use error::{Error, Result};
