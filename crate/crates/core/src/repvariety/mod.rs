//! Representation varieties `Hom(π₁ Γ, G)/G` of approximant complexes into
//! finite groups, and their direct limits along the forgetful tower.

pub mod group;
pub mod presentation;
pub mod variety;

pub use group::FiniteGroup;
pub use presentation::{
    fundamental_presentation, fundamental_presentation_from, induced_on_generators, Presentation,
};
pub use variety::{
    abelian_crosscheck, conj_quotient, enumerate_homs, enumerate_homs_with_budget,
    induced_repvar_map, rep_variety, repvar_limit, AbelianCrosscheck, RepVariety, Representation,
    VarietyLimit, VarietyMap,
};
