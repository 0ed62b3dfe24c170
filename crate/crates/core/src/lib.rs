//! Finitary Hindman machinery: exact small Spencer, disjoint-union and
//! finitary Hindman numbers with certificates, the recursive upper bound on
//! Spencer numbers, and a replay of the constructive upper-bound argument
//! that extracts a witness from a concrete coloring.

pub mod bounds;
pub mod cli;
pub mod error;
pub mod formats;
pub mod model;
pub mod replay;
pub mod search;

pub use error::{Error, Result};
pub use model::{
    color_of, exp2, nu, precedes, set_of, sum_set, BlockFamily, Cell, Coloring, DomainKind, FiniteSet,
    SpencerWitness, UnionWitness,
};
