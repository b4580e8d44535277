//! Exact cohomology and pattern-equivariant representation varieties of
//! substitution tiling spaces, computed from collared approximant complexes.

pub mod approximant;
pub mod bundled;
pub mod cochain;
pub mod complex;
pub mod error;
pub mod homalg;
mod language;
pub mod patch;
pub mod repvariety;
pub mod substitution;

pub use approximant::{
    build_approximant, collared_tiles, forgetful_map, forgetful_map_between, substitution_map,
    substitution_map_on, ApproximantComplex, CollaredTile,
};
pub use complex::{complex_to_json, parse_complex, Cell, CellComplex, CellularMap};
pub use error::{Error, Result};
pub use patch::{
    corona, pe_radius_bound, t_equivalent, CanonicalLabel, Corona, Patch, Pos, TileId,
};
pub use substitution::{
    expand_patch, parse_rule, validate_rule, SubstitutionRule, ValidationReport,
};
