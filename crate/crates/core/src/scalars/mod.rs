//! Exact scalars: rationals, rational functions in ψ, c, λ, and the square-root
//! extension used by the Heisenberg embedding.

mod ext;
mod param;
mod poly;
mod rational;

use std::fmt;

use thiserror::Error;

pub use ext::{symbol_square, ExtScalar};
pub use param::ParamRational;
pub use poly::{Exp, Param, Poly};
pub use rational::{factorial, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("denominator vanishes at the given point")]
    PoleAtPoint,
    #[error("no value assigned to parameter {0}")]
    MissingParameter(String),
    #[error("cannot parse scalar {0:?}")]
    Parse(String),
}

/// Coefficient ring of field elements. Structure constants are always rational,
/// so the engine only needs `scale` to mix them in.
pub trait Coeff: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn from_rational(r: Rational) -> Self;
    fn add_assign_ref(&mut self, o: &Self);
    fn mul_ref(&self, o: &Self) -> Self;
    fn neg_ref(&self) -> Self;
    fn scale(&self, r: &Rational) -> Self;
    fn to_rational(&self) -> Option<Rational>;
    fn render(&self) -> String;
}

impl Coeff for Rational {
    fn zero() -> Self {
        Rational::zero()
    }
    fn one() -> Self {
        Rational::one()
    }
    fn is_zero(&self) -> bool {
        Rational::is_zero(self)
    }
    fn from_rational(r: Rational) -> Self {
        r
    }
    fn add_assign_ref(&mut self, o: &Self) {
        *self += o;
    }
    fn mul_ref(&self, o: &Self) -> Self {
        self * o
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn scale(&self, r: &Rational) -> Self {
        self * r
    }
    fn to_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }
    fn render(&self) -> String {
        self.to_string()
    }
}
