use std::collections::BTreeMap;
use std::fmt;

use super::{Coeff, Rational};

/// Rational linear combination of square-free products of the symbols n_i,
/// where n_i² = (4i+1)!. Keys are bitmasks: bit i−1 set means n_i is present.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct ExtScalar {
    terms: BTreeMap<u64, Rational>,
}

pub const MAX_SYMBOL: u32 = 63;

/// The declared square of n_i.
pub fn symbol_square(i: u32) -> Rational {
    Rational::factorial(4 * i as u64 + 1)
}

impl ExtScalar {
    pub fn zero() -> Self {
        ExtScalar::default()
    }

    pub fn from_rational(r: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !r.is_zero() {
            terms.insert(0, r);
        }
        ExtScalar { terms }
    }

    /// The symbol n_i, i ≥ 1.
    pub fn symbol(i: u32) -> Self {
        assert!((1..=MAX_SYMBOL).contains(&i), "symbol index out of range");
        let mut terms = BTreeMap::new();
        terms.insert(1u64 << (i - 1), Rational::one());
        ExtScalar { terms }
    }

    /// 1/n_i expressed as n_i/(4i+1)!.
    pub fn symbol_inverse(i: u32) -> Self {
        Self::symbol(i).scale_by(&symbol_square(i).recip().unwrap())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn normalize(&self) -> Self {
        ExtScalar {
            terms: self.terms.iter().filter(|(_, v)| !v.is_zero()).map(|(k, v)| (*k, v.clone())).collect(),
        }
    }

    /// `Some` exactly when no symbol survives.
    pub fn to_rational(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&0).cloned(),
            _ => None,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (Vec<u32>, &Rational)> {
        self.terms.iter().map(|(m, v)| (mask_symbols(*m), v))
    }

    pub fn scale_by(&self, r: &Rational) -> Self {
        if r.is_zero() {
            return ExtScalar::zero();
        }
        ExtScalar { terms: self.terms.iter().map(|(k, v)| (*k, v * r)).collect() }
    }

    fn add_term(&mut self, mask: u64, v: Rational) {
        if v.is_zero() {
            return;
        }
        let slot = self.terms.entry(mask).or_default();
        *slot += v;
        if slot.is_zero() {
            self.terms.remove(&mask);
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (k, v) in &o.terms {
            out.add_term(*k, v.clone());
        }
        out
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = ExtScalar::zero();
        for (k1, v1) in &self.terms {
            for (k2, v2) in &o.terms {
                let mut v = v1 * v2;
                for i in mask_symbols(k1 & k2) {
                    v *= symbol_square(i);
                }
                out.add_term(k1 ^ k2, v);
            }
        }
        out
    }

    pub fn neg(&self) -> Self {
        ExtScalar { terms: self.terms.iter().map(|(k, v)| (*k, -v)).collect() }
    }
}

fn mask_symbols(mut m: u64) -> Vec<u32> {
    let mut out = Vec::new();
    while m != 0 {
        let b = m.trailing_zeros();
        out.push(b + 1);
        m &= m - 1;
    }
    out
}

impl fmt::Display for ExtScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, v)| {
                let syms: Vec<String> = mask_symbols(*m).into_iter().map(|i| format!("n{i}")).collect();
                if syms.is_empty() {
                    v.to_string()
                } else {
                    format!("{}*{}", v, syms.join("*"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for ExtScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<Rational> for ExtScalar {
    fn from(r: Rational) -> Self {
        ExtScalar::from_rational(r)
    }
}

impl Coeff for ExtScalar {
    fn zero() -> Self {
        ExtScalar::zero()
    }
    fn one() -> Self {
        ExtScalar::from_rational(Rational::one())
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn from_rational(r: Rational) -> Self {
        ExtScalar::from_rational(r)
    }
    fn add_assign_ref(&mut self, o: &Self) {
        for (k, v) in &o.terms {
            self.add_term(*k, v.clone());
        }
    }
    fn mul_ref(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn neg_ref(&self) -> Self {
        self.neg()
    }
    fn scale(&self, r: &Rational) -> Self {
        self.scale_by(r)
    }
    fn to_rational(&self) -> Option<Rational> {
        ExtScalar::to_rational(self)
    }
    fn render(&self) -> String {
        self.to_string()
    }
}
