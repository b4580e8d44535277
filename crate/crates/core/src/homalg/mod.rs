//! Integer homological algebra.

pub mod cohomology;
pub mod group;
pub mod limit;
pub mod matrix;
pub mod snf;

pub use cohomology::{cohomology, induced_map, CochainComplex, Coefficients, CohomologyResult};
pub use group::{AbelianGroup, GroupHom};
pub use limit::{
    direct_limit_endomorphism, direct_limit_sequence, direct_limit_sequence_rational, group_equal,
    Equality, LimitGroup,
};
pub use matrix::{IntegerMatrix, SparseMatrixDoc};
pub use snf::{smith_normal_form, SmithDecomposition};
