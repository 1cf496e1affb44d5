//! Exact computations in free-field vertex algebras and their Z2-orbifolds.

pub mod cli;
pub mod curves;
pub mod fock;
pub mod linalg;
pub mod orbifold;
pub mod freefield;
pub mod relations;
pub mod scalars;
pub mod series;
