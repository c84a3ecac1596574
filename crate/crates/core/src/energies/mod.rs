//! Energy terms, fluxes and the exact-identity catalog, mostly in one space
//! dimension where every term is available in closed form through jets.

mod catalog;
mod ctx;
mod budget;
mod terms;

pub use catalog::{check_identity, evaluate, IdentityValue, CATALOG};
pub use ctx::{jet_space, Ctx, DEGREE};
pub use budget::{
    fit_constants, lemma_2_1, lemma_2_4, pointwise_budget, EnergyReport, Lemma21Report, Lemma24Report,
    NamedIntegral,
};
pub use terms::{
    bh_terms, boundary_flux, budget_from_ctx, budget_integrals, flux_divergence, fluxes_from_ctx,
    low_order_integrals, low_order_terms, BoundaryFluxes, EnergyBudget, FluxDivergence, FluxFace,
    LowOrderEnergies,
};
