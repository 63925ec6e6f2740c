//! Finite posets, Garside groups of braids, affine versions of graded lattices,
//! Helly graph checks and the Coxeter complexes of types A and C.

pub mod affine;
pub mod catalog;
pub mod coxeter;
pub mod exec;
pub mod garside;
pub mod helly;
pub mod numeric;
pub mod poset;
pub mod suites;

pub use catalog::{CatalogRecipe, CoxeterGraph};
pub use exec::Exec;
pub use poset::{Bound, BoundKind, Elem, FinitePoset, PosetError, PosetProfile};
