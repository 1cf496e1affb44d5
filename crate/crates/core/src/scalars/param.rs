use std::fmt;

use num_bigint::BigInt;
use num_traits::Signed;

use super::poly::{Param, Poly};
use super::{Rational, ScalarError};

/// Rational function in the named parameters, kept in lowest terms.
///
/// `params` records the declared parameter set (a bitmask over `Param`); it is the
/// union of the operands' sets and does not take part in equality.
#[derive(Clone)]
pub struct ParamRational {
    num: Poly,
    den: Poly,
    params: u8,
}

impl PartialEq for ParamRational {
    fn eq(&self, other: &Self) -> bool {
        self.num == other.num && self.den == other.den
    }
}

impl Eq for ParamRational {}

impl ParamRational {
    pub fn new(num: Poly, den: Poly) -> Result<Self, ScalarError> {
        let params = num.vars() | den.vars();
        Self::with_params(num, den, params)
    }

    pub fn with_params(num: Poly, den: Poly, params: u8) -> Result<Self, ScalarError> {
        if den.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(ParamRational { num, den, params }.normalize())
    }

    pub fn from_poly(p: Poly) -> Self {
        let params = p.vars();
        ParamRational { num: p, den: Poly::one(), params }
    }

    pub fn constant(r: &Rational) -> Self {
        ParamRational {
            num: Poly::constant(r.numer().clone()),
            den: Poly::constant(r.denom().clone()),
            params: 0,
        }
    }

    pub fn var(p: Param) -> Self {
        ParamRational { num: Poly::var(p), den: Poly::one(), params: p.bit() }
    }

    pub fn zero() -> Self {
        Self::from_poly(Poly::zero())
    }

    pub fn one() -> Self {
        Self::from_poly(Poly::one())
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn params(&self) -> Vec<Param> {
        Param::ALL.into_iter().filter(|p| self.params & p.bit() != 0).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Cancel the gcd and make the denominator's leading coefficient positive.
    pub fn normalize(&self) -> Self {
        if self.num.is_zero() {
            return ParamRational { num: Poly::zero(), den: Poly::one(), params: self.params };
        }
        let g = Poly::gcd(&self.num, &self.den);
        let mut num = self.num.div_exact(&g).expect("gcd divides numerator");
        let mut den = self.den.div_exact(&g).expect("gcd divides denominator");
        if den.leading().is_some_and(|(_, c)| c.is_negative()) {
            num = -&num;
            den = -&den;
        }
        ParamRational { num, den, params: self.params }
    }

    pub fn checked_div(&self, o: &Self) -> Result<Self, ScalarError> {
        if o.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Self::with_params(&self.num * &o.den, &self.den * &o.num, self.params | o.params)
    }

    pub fn pow(&self, k: u32) -> Self {
        ParamRational { num: self.num.pow(k), den: self.den.pow(k), params: self.params }
    }

    pub fn evaluate_at(&self, assignment: &[(Param, Rational)]) -> Result<Rational, ScalarError> {
        let mut vals: [Option<Rational>; 3] = [None, None, None];
        for (p, v) in assignment {
            vals[*p as usize] = Some(v.clone());
        }
        let d = self.den.eval(&vals)?;
        if d.is_zero() {
            return Err(ScalarError::PoleAtPoint);
        }
        Ok(self.num.eval(&vals)? / d)
    }

    /// Substitute rational functions for parameters.
    pub fn substitute(&self, subs: &[(Param, ParamRational)]) -> Result<Self, ScalarError> {
        let n = subst_poly(&self.num, subs)?;
        let d = subst_poly(&self.den, subs)?;
        n.checked_div(&d)
    }
}

fn subst_poly(p: &Poly, subs: &[(Param, ParamRational)]) -> Result<ParamRational, ScalarError> {
    let mut acc = ParamRational::zero();
    for (e, c) in p.terms() {
        let mut t = ParamRational::from_poly(Poly::constant(c.clone()));
        for v in Param::ALL {
            let k = e.0[v as usize];
            if k == 0 {
                continue;
            }
            let base = match subs.iter().find(|(q, _)| *q == v) {
                Some((_, r)) => r.clone(),
                None => ParamRational::var(v),
            };
            t = &t * &base.pow(k);
        }
        acc = &acc + &t;
    }
    Ok(acc)
}

impl<'a> std::ops::Add<&'a ParamRational> for &'a ParamRational {
    type Output = ParamRational;
    fn add(self, o: &'a ParamRational) -> ParamRational {
        ParamRational::with_params(
            &(&self.num * &o.den) + &(&o.num * &self.den),
            &self.den * &o.den,
            self.params | o.params,
        )
        .expect("nonzero denominators")
    }
}

impl<'a> std::ops::Sub<&'a ParamRational> for &'a ParamRational {
    type Output = ParamRational;
    fn sub(self, o: &'a ParamRational) -> ParamRational {
        self + &(-o)
    }
}

impl<'a> std::ops::Mul<&'a ParamRational> for &'a ParamRational {
    type Output = ParamRational;
    fn mul(self, o: &'a ParamRational) -> ParamRational {
        ParamRational::with_params(&self.num * &o.num, &self.den * &o.den, self.params | o.params)
            .expect("nonzero denominators")
    }
}

impl std::ops::Neg for &ParamRational {
    type Output = ParamRational;
    fn neg(self) -> ParamRational {
        ParamRational { num: -&self.num, den: self.den.clone(), params: self.params }
    }
}

impl fmt::Display for ParamRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == Poly::one() {
            write!(f, "{}", self.num)
        } else if self.den.as_constant().is_some() {
            write!(f, "({})/{}", self.num, self.den)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for ParamRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<Poly> for ParamRational {
    fn from(p: Poly) -> Self {
        ParamRational::from_poly(p)
    }
}

impl From<i64> for ParamRational {
    fn from(n: i64) -> Self {
        ParamRational::from_poly(Poly::constant(BigInt::from(n)))
    }
}
