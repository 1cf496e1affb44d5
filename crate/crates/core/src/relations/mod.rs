//! Spanning, decoupling and generation questions in a fixed free-field algebra.

mod basis;
mod closure;
mod decouple;
mod identities;
mod minimal;

use thiserror::Error;

pub use basis::{basis_with, weight_basis, BasisCache, WeightBasis};
pub use closure::{weak_closure, ClosureReport, WeightStatus};
pub use decouple::{decouple, Certificate, Factor, RelationReport, Status, Word, DEFAULT_MAX_WORD_DEGREE};
pub use identities::{verify_identity, CoefficientCheck, IdentityParams, IdentityReport, IDENTITY_NAMES};
pub use minimal::{minimal_generators, minimal_generators_cached, TypeProfile};

use crate::fock::{FieldElement, FockError};
use crate::orbifold::OrbifoldError;

#[derive(Debug, Error)]
pub enum RelationsError {
    #[error("elements are not homogeneous of one common weight")]
    InhomogeneousInput,
    #[error("identity parameters out of range: {0}")]
    IdentityDomainError(String),
    #[error(transparent)]
    Orbifold(#[from] OrbifoldError),
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

/// Rank of the coefficient matrix of homogeneous elements of one weight.
pub fn span_rank(elements: &[FieldElement]) -> Result<usize, RelationsError> {
    let mut w = None;
    for x in elements.iter().filter(|x| !x.is_zero()) {
        let wx = x.weight2x().ok_or(RelationsError::InhomogeneousInput)?;
        if *w.get_or_insert(wx) != wx {
            return Err(RelationsError::InhomogeneousInput);
        }
    }
    Ok(crate::linalg::rank(elements))
}
