//! The spatial function η and the weight families θ = e^{λξ}.

pub mod condition;
pub mod eta;
pub mod field;
pub mod spec;

pub use condition::{check_condition_1_1, family_iii_slab, ConditionReport};
pub use eta::{build_eta, build_eta_at, check_eta, Eta1d, EtaField};
pub use field::{build_weight, WeightField, WeightJets, WeightPoint};
pub use spec::{Family, FamilyTag, Lambda, Mu, WeightConfig, WeightSpec};
