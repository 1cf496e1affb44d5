use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{Rational, ScalarError};

/// The closed parameter set. Variable precedence for the monomial order is ψ < c < λ.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Param {
    Psi = 0,
    C = 1,
    Lambda = 2,
}

impl Param {
    pub const ALL: [Param; 3] = [Param::Psi, Param::C, Param::Lambda];

    pub fn name(self) -> &'static str {
        match self {
            Param::Psi => "psi",
            Param::C => "c",
            Param::Lambda => "lambda",
        }
    }

    pub fn parse(s: &str) -> Option<Param> {
        match s {
            "psi" | "ψ" => Some(Param::Psi),
            "c" => Some(Param::C),
            "lambda" | "λ" => Some(Param::Lambda),
            _ => None,
        }
    }

    pub fn bit(self) -> u8 {
        1 << (self as u8)
    }
}

/// Exponent vector indexed by `Param`, ordered graded-lex with λ most significant.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct Exp(pub [u32; 3]);

impl Exp {
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn divides(&self, other: &Exp) -> bool {
        (0..3).all(|i| self.0[i] <= other.0[i])
    }

    fn sub(&self, other: &Exp) -> Exp {
        Exp([self.0[0] - other.0[0], self.0[1] - other.0[1], self.0[2] - other.0[2]])
    }

    fn add(&self, other: &Exp) -> Exp {
        Exp([self.0[0] + other.0[0], self.0[1] + other.0[1], self.0[2] + other.0[2]])
    }
}

impl Ord for Exp {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then(self.0[2].cmp(&other.0[2]))
            .then(self.0[1].cmp(&other.0[1]))
            .then(self.0[0].cmp(&other.0[0]))
    }
}

impl PartialOrd for Exp {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Integer-coefficient polynomial in ψ, c, λ. Terms are kept sorted; the last is leading.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Exp, BigInt>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(BigInt::one())
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Exp::default(), c);
        }
        Poly { terms }
    }

    pub fn var(p: Param) -> Self {
        let mut e = Exp::default();
        e.0[p as usize] = 1;
        Poly::monomial(e, BigInt::one())
    }

    pub fn monomial(e: Exp, c: BigInt) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        Poly { terms }
    }

    /// a·var + b, the linear factors used by the curve formulas.
    pub fn linear(p: Param, a: i64, b: i64) -> Self {
        &Poly::var(p).scale(&BigInt::from(a)) + &Poly::constant(b)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exp, &BigInt)> {
        self.terms.iter()
    }

    pub fn leading(&self) -> Option<(&Exp, &BigInt)> {
        self.terms.iter().next_back()
    }

    pub fn as_constant(&self) -> Option<BigInt> {
        match self.terms.len() {
            0 => Some(BigInt::zero()),
            1 => self.terms.get(&Exp::default()).cloned(),
            _ => None,
        }
    }

    pub fn vars(&self) -> u8 {
        let mut m = 0;
        for e in self.terms.keys() {
            for p in Param::ALL {
                if e.0[p as usize] > 0 {
                    m |= p.bit();
                }
            }
        }
        m
    }

    pub fn degree_in(&self, p: Param) -> i64 {
        self.terms.keys().map(|e| e.0[p as usize] as i64).max().unwrap_or(-1)
    }

    pub fn scale(&self, c: &BigInt) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(e, v)| (*e, v * c)).collect(),
        }
    }

    fn add_term(&mut self, e: Exp, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_insert_with(BigInt::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Positive gcd of the integer coefficients.
    pub fn content(&self) -> BigInt {
        self.terms.values().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Multiply by −1 when the leading coefficient is negative.
    pub fn sign_normalized(&self) -> Poly {
        match self.leading() {
            Some((_, c)) if c.is_negative() => self.scale(&BigInt::from(-1)),
            _ => self.clone(),
        }
    }

    /// Exact quotient, or `None` when `d` does not divide `self` over Z.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (de, dc) = d.leading()?;
        let (de, dc) = (*de, dc.clone());
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        while let Some((re, rc)) = rem.leading() {
            if !de.divides(re) {
                return None;
            }
            let (q, r) = rc.div_rem(&dc);
            if !r.is_zero() {
                return None;
            }
            let te = re.sub(&de);
            let t = Poly::monomial(te, q.clone());
            quot.add_term(te, q);
            rem = &rem - &(&t * d);
        }
        Some(quot)
    }

    /// Coefficients with respect to `p`, each a polynomial free of `p`.
    fn split(&self, p: Param) -> Vec<Poly> {
        let d = self.degree_in(p);
        let mut out = vec![Poly::zero(); (d + 1).max(0) as usize];
        for (e, c) in &self.terms {
            let k = e.0[p as usize] as usize;
            let mut e2 = *e;
            e2.0[p as usize] = 0;
            out[k].add_term(e2, c.clone());
        }
        out
    }

    fn unsplit(parts: &[Poly], p: Param) -> Poly {
        let mut out = Poly::zero();
        for (k, part) in parts.iter().enumerate() {
            for (e, c) in &part.terms {
                let mut e2 = *e;
                e2.0[p as usize] += k as u32;
                out.add_term(e2, c.clone());
            }
        }
        out
    }

    fn content_in(&self, p: Param) -> Poly {
        self.split(p)
            .into_iter()
            .filter(|c| !c.is_zero())
            .fold(Poly::zero(), |g, c| Poly::gcd(&g, &c))
    }

    fn pseudo_rem(a: &Poly, b: &Poly, p: Param) -> Poly {
        let bs = b.split(p);
        let db = bs.len() - 1;
        let lb = bs[db].clone();
        let mut r = a.split(p);
        while r.len() > db && !r.is_empty() {
            let dr = r.len() - 1;
            let lr = r[dr].clone();
            let shift = dr - db;
            let mut next: Vec<Poly> = r.iter().map(|c| c * &lb).collect();
            for (k, bc) in bs.iter().enumerate() {
                next[k + shift] = &next[k + shift] - &(&lr * bc);
            }
            while next.last().is_some_and(|c| c.is_zero()) {
                next.pop();
            }
            r = next;
        }
        Poly::unsplit(&r, p)
    }

    /// Greatest common divisor over Z with positive leading coefficient.
    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        if a.is_zero() {
            return b.sign_normalized();
        }
        if b.is_zero() {
            return a.sign_normalized();
        }
        let vars = a.vars() | b.vars();
        let Some(p) = Param::ALL.iter().rev().copied().find(|p| vars & p.bit() != 0) else {
            let g = a.as_constant().unwrap().gcd(&b.as_constant().unwrap());
            return Poly::constant(g);
        };
        let ca = a.content_in(p);
        let cb = b.content_in(p);
        let gc = Poly::gcd(&ca, &cb);
        let mut x = a.div_exact(&ca).expect("content divides");
        let mut y = b.div_exact(&cb).expect("content divides");
        if x.degree_in(p) < y.degree_in(p) {
            std::mem::swap(&mut x, &mut y);
        }
        loop {
            if y.is_zero() {
                break;
            }
            if y.degree_in(p) == 0 {
                x = Poly::one();
                break;
            }
            let r = Poly::pseudo_rem(&x, &y, p);
            x = y;
            y = if r.is_zero() {
                r
            } else {
                let c = r.content_in(p);
                r.div_exact(&c).expect("content divides")
            };
        }
        let cx = x.content_in(p);
        let x = x.div_exact(&cx).expect("content divides");
        (&gc * &x).sign_normalized()
    }

    pub fn eval(&self, vals: &[Option<Rational>; 3]) -> Result<Rational, ScalarError> {
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut t = Rational::from_integer(c.clone());
            for p in Param::ALL {
                let k = e.0[p as usize];
                if k > 0 {
                    let v = vals[p as usize]
                        .as_ref()
                        .ok_or_else(|| ScalarError::MissingParameter(p.name().to_string()))?;
                    t *= v.pow(k as i32);
                }
            }
            acc += t;
        }
        Ok(acc)
    }
}

impl<'a> std::ops::Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, o: &'a Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl<'a> std::ops::Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, o: &'a Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(*e, -c);
        }
        out
    }
}

impl<'a> std::ops::Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, o: &'a Poly) -> Poly {
        let mut out = Poly::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                out.add_term(e1.add(e2), c1 * c2);
            }
        }
        out
    }
}

impl std::ops::Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&BigInt::from(-1))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms.iter().rev().enumerate() {
            let mut factors = Vec::new();
            for p in [Param::Psi, Param::C, Param::Lambda] {
                match e.0[p as usize] {
                    0 => {}
                    1 => factors.push(p.name().to_string()),
                    d => factors.push(format!("{}^{}", p.name(), d)),
                }
            }
            let mag = c.abs();
            let body = if factors.is_empty() {
                mag.to_string()
            } else if mag.is_one() {
                factors.join("*")
            } else {
                format!("{}*{}", mag, factors.join("*"))
            };
            match (k, c.is_negative()) {
                (0, true) => write!(f, "-{body}")?,
                (0, false) => write!(f, "{body}")?,
                (_, true) => write!(f, " - {body}")?,
                (_, false) => write!(f, " + {body}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
