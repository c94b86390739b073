//! Finite-geometry toolkit for projective planes of order 16: plane
//! construction and ingestion, unital verification and search, exact
//! automorphism and stabilizer group orders, and isomorphism
//! classification of unitals.

pub mod canon;
pub mod error;
pub mod field;
pub mod geometry;
pub mod graph;
pub mod group;
pub mod incidence;
pub mod perm;

pub use error::{Error, Result};
