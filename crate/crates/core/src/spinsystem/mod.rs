//! Finite-volume Gibbs measures of unbounded ferromagnets on a quenched graph.

mod chain;
mod measure;
mod moments;
mod oracle;
mod profile;
mod state;
mod update;

pub use chain::{run_chain, vertex_means, Chain, ChainConfig, ChainRecord, ChainResult, InitialState};
pub use measure::{SingleSpinMeasure, DEFAULT_TOL, TRUNCATION_LOG_RATIO};
pub use moments::{check_moment_condition, MomentCheck};
pub use oracle::{
    exact_enumeration_ising, quadrature_marginals, IsingExact, Marginals, MAX_ENUMERATION_VERTICES,
    MAX_QUADRATURE_SITES,
};
pub use profile::{InteractionProfile, ProfileShape};
pub use state::{
    box_interior, central_cluster_subset, central_vertices, local_field, magnetization, relative_energy,
    temperedness, Couplings, SpinState,
};
pub use update::{
    default_rule, heat_bath_plus_probability, heat_bath_step_ising, metropolis_acceptance,
    metropolis_step_continuous, update_rule, HeatBath, Metropolis, SiteUpdate, UPDATE_RULES,
};
