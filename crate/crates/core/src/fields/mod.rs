//! Space-time domains, quadrature, manufactured fields and the
//! finite-difference oracle.

pub mod domain;
pub mod fd;
pub mod quadrature;
pub mod testfield;

pub use domain::{Face, Interval, Side, SpaceTimeDomain};
pub use fd::{contract_orders, default_step, fd_oracle, fd_oracle_auto, fd_oracle_steps, oracle_agreement};
pub use quadrature::{integrate, make_grid, AxisRule, QuadratureGrid};
pub use testfield::{
    exterior_test_field, random_test_field, windowed_test_field, Factor, Primitive, Seed,
    SpatialBc, TemporalCondition, Term, TestField,
};
