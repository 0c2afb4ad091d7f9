//! Instance generators: the set-cover encoding, the promise variant with
//! chain composition, and the clique-selection gadget construction, plus the
//! primitives (chains, bundles, feathers, id assignments) they are built
//! from.

pub mod amse;
pub mod gadget;
pub mod mcc;
pub mod setcover;
pub mod sidon;

pub use amse::{mse_to_amse, or_cross_compose, PromiseInstance};
pub use mcc::{
    budget_formula, closed_form_size, faithful_parameters, mcc_to_mse, route_formula,
    validate_gadget_graph, ComponentSpec, KPartiteGraph, MccConfig, MccOutput, MccReport,
};
pub use setcover::{brute_force_set_cover, expected_routes, setcover_to_mse, SetCover};
pub use sidon::{check_properties, sidon_assignment, SidonAssignment, SidonCheck};
