//! Normally ordered monomials, field elements, ∂, and the n-th products.

mod monomial;
mod wick;

use std::collections::BTreeMap;
use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use monomial::{Leg, Legs, Monomial};

use crate::freefield::{EmbeddingMap, FreeFieldSpec};
use crate::scalars::{Coeff, ExtScalar, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FockError {
    #[error("operands belong to different algebras")]
    MixedAlgebras,
    #[error("leg {leg} has derivative order below the embedding shift")]
    NotInSubalgebra { leg: String },
    #[error("irrational coefficient survived projection: {0}")]
    NormalizationLeak(String),
    #[error("unknown generator {0}")]
    UnknownGenerator(String),
    #[error("malformed element JSON: {0}")]
    Json(String),
}

/// Linear combination of canonical monomials over a fixed free-field algebra.
#[derive(Clone, Debug)]
pub struct FieldElement<C: Coeff = Rational> {
    spec: Arc<FreeFieldSpec>,
    terms: BTreeMap<Monomial, C>,
}

impl<C: Coeff> PartialEq for FieldElement<C> {
    fn eq(&self, o: &Self) -> bool {
        (Arc::ptr_eq(&self.spec, &o.spec) || self.spec == o.spec) && self.terms == o.terms
    }
}

impl<C: Coeff> FieldElement<C> {
    pub fn zero(spec: &Arc<FreeFieldSpec>) -> Self {
        FieldElement { spec: spec.clone(), terms: BTreeMap::new() }
    }

    pub fn vacuum(spec: &Arc<FreeFieldSpec>) -> Self {
        Self::from_monomial(spec, Monomial::vacuum(), C::one())
    }

    pub fn from_monomial(spec: &Arc<FreeFieldSpec>, m: Monomial, c: C) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        FieldElement { spec: spec.clone(), terms }
    }

    /// The single leg ∂^der X^gen.
    pub fn leg(spec: &Arc<FreeFieldSpec>, gen: usize, der: u16) -> Self {
        Self::from_monomial(spec, Monomial::from_sorted(Legs::from_slice(&[Leg::new(gen, der)])), C::one())
    }

    pub fn generator(spec: &Arc<FreeFieldSpec>, gen: usize) -> Self {
        Self::leg(spec, gen, 0)
    }

    pub fn from_legs(spec: &Arc<FreeFieldSpec>, legs: &[Leg], c: C) -> Self {
        match Monomial::canonical(spec, legs.iter().copied()) {
            Some((m, neg)) => Self::from_monomial(spec, m, if neg { c.neg_ref() } else { c }),
            None => Self::zero(spec),
        }
    }

    pub fn from_terms(spec: &Arc<FreeFieldSpec>, terms: impl IntoIterator<Item = (Monomial, C)>) -> Self {
        let mut out = Self::zero(spec);
        for (m, c) in terms {
            out.add_term(m, &c);
        }
        out
    }

    pub fn spec(&self) -> &Arc<FreeFieldSpec> {
        &self.spec
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: &C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(slot) => {
                slot.add_assign_ref(c);
                if slot.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c.clone());
            }
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), c);
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        FieldElement { spec: self.spec.clone(), terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg_ref())).collect() }
    }

    pub fn scale(&self, k: &C) -> Self {
        if k.is_zero() {
            return Self::zero(&self.spec);
        }
        FieldElement { spec: self.spec.clone(), terms: self.terms.iter().map(|(m, c)| (m.clone(), c.mul_ref(k))).collect() }
    }

    pub fn scale_rational(&self, k: &Rational) -> Self {
        self.scale(&C::from_rational(k.clone()))
    }

    /// Weight (doubled) if all terms share one weight.
    pub fn weight2x(&self) -> Option<u32> {
        let mut w = None;
        for m in self.terms.keys() {
            let x = m.weight2x(&self.spec);
            match w {
                None => w = Some(x),
                Some(y) if y != x => return None,
                _ => {}
            }
        }
        w
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.weight2x().is_some()
    }

    /// Parity if all terms agree.
    pub fn is_odd(&self) -> Option<bool> {
        let mut p = None;
        for m in self.terms.keys() {
            let x = m.is_odd(&self.spec);
            match p {
                None => p = Some(x),
                Some(y) if y != x => return None,
                _ => {}
            }
        }
        p
    }

    /// Split into components of fixed weight and parity.
    pub fn homogeneous_parts(&self) -> Vec<FieldElement<C>> {
        let mut parts: BTreeMap<(u32, bool), FieldElement<C>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let key = (m.weight2x(&self.spec), m.is_odd(&self.spec));
            parts.entry(key).or_insert_with(|| Self::zero(&self.spec)).add_term(m.clone(), c);
        }
        parts.into_values().collect()
    }

    /// Translation operator, by the Leibniz rule over legs.
    pub fn derivative(&self) -> Self {
        let mut out = Self::zero(&self.spec);
        for (m, c) in &self.terms {
            for (mm, k) in monomial_derivative(&self.spec, m) {
                out.add_term(mm, &c.scale(&k));
            }
        }
        out
    }

    pub fn derivative_k(&self, k: u32) -> Self {
        let mut x = self.clone();
        for _ in 0..k {
            x = x.derivative();
        }
        x
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> FieldElement<D> {
        let mut out = FieldElement::<D>::zero(&self.spec);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), &f(c));
        }
        out
    }

    /// Rational form, if every coefficient is rational.
    pub fn to_rational(&self) -> Option<FieldElement<Rational>> {
        let mut out = FieldElement::<Rational>::zero(&self.spec);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), &c.to_rational()?);
        }
        Some(out)
    }

    fn check_same(&self, o: &Self) -> Result<(), FockError> {
        if Arc::ptr_eq(&self.spec, &o.spec) || *self.spec == *o.spec {
            Ok(())
        } else {
            Err(FockError::MixedAlgebras)
        }
    }

    /// The n-th product self_(n) o.
    pub fn nth_product(&self, n: i64, o: &Self) -> Result<Self, FockError> {
        self.check_same(o)?;
        let mut acc: HashMap<Monomial, C> = HashMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                let cab = ca.mul_ref(cb);
                wick::monomial_product(&self.spec, ma, n, mb, &mut |m, r| {
                    let v = cab.scale(&r);
                    match acc.get_mut(&m) {
                        Some(slot) => slot.add_assign_ref(&v),
                        None => {
                            acc.insert(m, v);
                        }
                    }
                });
            }
        }
        Ok(FieldElement { spec: self.spec.clone(), terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect() })
    }

    /// :self o: = self_(−1) o.
    pub fn normal_order(&self, o: &Self) -> Result<Self, FockError> {
        self.nth_product(-1, o)
    }

    fn describe_leg(&self, l: &Leg) -> String {
        format!("d^{} {}", l.der, self.spec.generator(l.gen as usize).name)
    }
}

/// ∂ of a single monomial.
pub fn monomial_derivative(spec: &FreeFieldSpec, m: &Monomial) -> Vec<(Monomial, Rational)> {
    let mut acc: BTreeMap<Monomial, Rational> = BTreeMap::new();
    for k in 0..m.len() {
        let mut legs: Legs = m.legs().into();
        legs[k].der += 1;
        if let Some((mm, neg)) = Monomial::canonical(spec, legs) {
            let slot = acc.entry(mm).or_default();
            if neg {
                *slot -= Rational::one();
            } else {
                *slot += Rational::one();
            }
        }
    }
    acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

/// Rational-coefficient products of single monomials; used by the linear-algebra layers.
pub fn monomial_nth_product(spec: &FreeFieldSpec, a: &Monomial, n: i64, b: &Monomial) -> Vec<(Monomial, Rational)> {
    let mut acc: HashMap<Monomial, Rational> = HashMap::new();
    wick::monomial_product(spec, a, n, b, &mut |m, r| {
        *acc.entry(m).or_default() += r;
    });
    let mut v: Vec<_> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
    v.sort_by(|x, y| x.0.cmp(&y.0));
    v
}

impl FieldElement<ExtScalar> {
    /// Rewrite ∂^{s+e} α as n_i ∂^e W for the embedded generators and clear all symbols.
    pub fn project_to_subalgebra(&self, e: &EmbeddingMap) -> Result<FieldElement<Rational>, FockError> {
        if !(Arc::ptr_eq(&self.spec, &e.target) || *self.spec == *e.target) {
            return Err(FockError::MixedAlgebras);
        }
        let mut out = FieldElement::<ExtScalar>::zero(&e.source);
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut legs = Legs::new();
            for l in m.legs() {
                let g = e
                    .source_index_for_target(l.gen as usize)
                    .ok_or_else(|| FockError::NotInSubalgebra { leg: self.describe_leg(l) })?;
                let (_, shift, k) = e.leg_image(g);
                if l.der < *shift {
                    return Err(FockError::NotInSubalgebra { leg: self.describe_leg(l) });
                }
                let ki = k.to_rational().map(|r| ExtScalar::from_rational(r.recip().expect("nonzero image")));
                // k = q·n_i, so 1/k = n_i/(q·(4i+1)!) and the product below stays multilinear.
                let inv = match ki {
                    Some(x) => x,
                    None => invert_monomial_ext(k),
                };
                coeff = coeff.mul(&inv);
                legs.push(Leg::new(g, l.der - shift));
            }
            if let Some((mm, neg)) = Monomial::canonical(&e.source, legs) {
                out.add_term(mm, &if neg { coeff.neg() } else { coeff });
            }
        }
        out.to_rational().ok_or_else(|| FockError::NormalizationLeak(format!("{:?}", out)))
    }
}

/// Inverse of q·Π n_i as (1/q)·Π n_i/(4i+1)!.
fn invert_monomial_ext(k: &ExtScalar) -> ExtScalar {
    let (syms, q) = k.terms().next().expect("nonzero image coefficient");
    let mut out = ExtScalar::from_rational(q.recip().expect("nonzero"));
    for i in syms {
        out = out.mul(&ExtScalar::symbol_inverse(i));
    }
    out
}

#[derive(Serialize, Deserialize)]
struct LegJson {
    gen: String,
    der: u16,
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    coeff: Rational,
    legs: Vec<LegJson>,
}

#[derive(Serialize, Deserialize)]
struct ElementJson {
    terms: Vec<TermJson>,
}

impl FieldElement<Rational> {
    pub fn to_json(&self) -> serde_json::Value {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| TermJson {
                coeff: c.clone(),
                legs: m
                    .legs()
                    .iter()
                    .map(|l| LegJson { gen: self.spec.generator(l.gen as usize).name.clone(), der: l.der })
                    .collect(),
            })
            .collect();
        serde_json::to_value(ElementJson { terms }).expect("element serializes")
    }

    pub fn from_json(spec: &Arc<FreeFieldSpec>, v: &serde_json::Value) -> Result<Self, FockError> {
        let e: ElementJson = serde_json::from_value(v.clone()).map_err(|e| FockError::Json(e.to_string()))?;
        let mut out = Self::zero(spec);
        for t in e.terms {
            let mut legs = Vec::new();
            for l in t.legs {
                let g = spec.index_of(&l.gen).ok_or_else(|| FockError::UnknownGenerator(l.gen.clone()))?;
                legs.push(Leg::new(g, l.der));
            }
            out = out.add(&Self::from_legs(spec, &legs, t.coeff));
        }
        Ok(out)
    }

    /// Human-readable form such as `1/2*d^1 W3*W3 + W4`.
    pub fn pretty(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let parts: Vec<(bool, String)> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let legs: Vec<String> = m
                    .legs()
                    .iter()
                    .map(|l| {
                        let name = &self.spec.generator(l.gen as usize).name;
                        match l.der {
                            0 => name.clone(),
                            1 => format!("D{name}"),
                            d => format!("D^{d}{name}"),
                        }
                    })
                    .collect();
                let body = match legs.len() {
                    0 => String::new(),
                    1 => legs[0].clone(),
                    _ => format!(":{}:", legs.join(" ")),
                };
                let mag = c.render();
                let (neg, mag) = match mag.strip_prefix('-') {
                    _ if mag.contains(' ') => (false, format!("({mag})")),
                    Some(rest) => (true, rest.to_string()),
                    None => (false, mag),
                };
                let text = match (body.is_empty(), mag == "1") {
                    (true, _) => mag,
                    (false, true) => body,
                    (false, false) => format!("{mag} {body}"),
                };
                (neg, text)
            })
            .collect();
        let mut out = String::new();
        for (k, (neg, text)) in parts.into_iter().enumerate() {
            match (k, neg) {
                (0, true) => out.push('-'),
                (0, false) => {}
                (_, true) => out.push_str(" - "),
                (_, false) => out.push_str(" + "),
            }
            out.push_str(&text);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freefield::{make_standard_algebra, wfree_sln, Family};

    fn sl(n: u32) -> Arc<FreeFieldSpec> {
        Arc::new(wfree_sln(n).unwrap())
    }

    fn w(s: &Arc<FreeFieldSpec>, i: usize) -> FieldElement {
        FieldElement::generator(s, i - 2)
    }

    #[test]
    fn derivative_examples() {
        let s = sl(4);
        let w3 = w(&s, 3);
        assert_eq!(w3.derivative(), FieldElement::leg(&s, 1, 1));
        let ww = w3.normal_order(&w3).unwrap();
        let expect = FieldElement::from_legs(&s, &[Leg::new(1, 1), Leg::new(1, 0)], Rational::from(2));
        assert_eq!(ww.derivative(), expect);
        assert!(FieldElement::<Rational>::vacuum(&s).derivative().is_zero());
    }

    #[test]
    fn generator_pairing() {
        let s = sl(4);
        let w3 = w(&s, 3);
        assert_eq!(w3.nth_product(5, &w3).unwrap(), FieldElement::vacuum(&s));
        for m in 0..5 {
            assert!(w3.nth_product(m, &w3).unwrap().is_zero());
        }
        let dw3 = w3.derivative();
        assert_eq!(dw3.nth_product(6, &w3).unwrap(), FieldElement::vacuum(&s).scale_rational(&Rational::from(-6)));
    }

    #[test]
    fn normal_order_examples() {
        let s = sl(4);
        let w3 = w(&s, 3);
        let ww = w3.normal_order(&w3).unwrap();
        assert_eq!(ww.weight2x(), Some(12));
        assert_eq!(ww.len(), 1);
        let u01 = w3.normal_order(&w3.derivative()).unwrap();
        assert_eq!(u01, ww.derivative().scale_rational(&Rational::frac(1, 2)));
        let w4 = w(&s, 4);
        assert_eq!(w3.normal_order(&w4).unwrap(), w4.normal_order(&w3).unwrap());
    }

    #[test]
    fn normal_order_is_not_associative() {
        let h = Arc::new(make_standard_algebra(Family::OEv, 1, 2).unwrap());
        let a = FieldElement::<Rational>::generator(&h, 0);
        let aa = a.normal_order(&a).unwrap();
        let left = aa.normal_order(&a).unwrap();
        let right = a.normal_order(&aa).unwrap();
        let cube = FieldElement::from_legs(&h, &[Leg::new(0, 0); 3], Rational::one());
        assert_eq!(right, cube);
        assert_eq!(left, cube.add(&FieldElement::leg(&h, 0, 2)));
    }

    #[test]
    fn raising_by_u33() {
        let s = sl(4);
        let w3 = w(&s, 3);
        let u00 = w3.normal_order(&w3).unwrap();
        let out = u00.nth_product(3, &u00).unwrap();
        // 2·U_{0,2} plus a multiple of ∂²U_{0,0}; the W3 ∂²W3 coefficient fixes the first part.
        let u02 = w3.normal_order(&w3.derivative_k(2)).unwrap();
        let rest = out.sub(&u02.scale_rational(&Rational::from(2)));
        let d2 = u00.derivative_k(2);
        let m = d2.terms().next().unwrap().0.clone();
        let ratio = rest.coefficient(&m) / d2.coefficient(&m);
        assert_eq!(rest, d2.scale_rational(&ratio));
    }

    #[test]
    fn square_of_cross_field() {
        let s = sl(5);
        let (w3, w5) = (w(&s, 3), w(&s, 5));
        let u35 = w3.normal_order(&w5).unwrap();
        let out = u35.nth_product(5, &u35).unwrap();
        let u55 = w5.normal_order(&w5).unwrap();
        let u33_40 = w3.derivative_k(4).normal_order(&w3).unwrap();
        assert_eq!(out, u55.add(&u33_40.scale_rational(&Rational::frac(1, 24))));
    }

    #[test]
    fn fermion_signs() {
        let f = Arc::new(make_standard_algebra(Family::OOdd, 2, 1).unwrap());
        let p1 = FieldElement::<Rational>::generator(&f, 0);
        let p2 = FieldElement::<Rational>::generator(&f, 1);
        assert!(p1.normal_order(&p1).unwrap().is_zero());
        assert_eq!(p1.normal_order(&p2).unwrap(), p2.normal_order(&p1).unwrap().neg());
        assert_eq!(p1.nth_product(0, &p1).unwrap(), FieldElement::vacuum(&f));
    }

    #[test]
    fn json_round_trip() {
        let s = sl(4);
        let w3 = w(&s, 3);
        let x = w3.normal_order(&w3).unwrap().derivative().scale_rational(&Rational::frac(1, 2));
        let j = x.to_json();
        assert_eq!(j["terms"][0]["coeff"], "1");
        assert_eq!(j["terms"][0]["legs"][0]["der"], 1);
        assert_eq!(FieldElement::from_json(&s, &j).unwrap(), x);
        let v = FieldElement::<Rational>::vacuum(&s).to_json();
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"{"terms":[{"coeff":"1","legs":[]}]}"#);
    }

    #[test]
    fn mixed_algebras_rejected() {
        let a = w(&sl(4), 3);
        let b = w(&sl(5), 3);
        assert_eq!(a.nth_product(0, &b), Err(FockError::MixedAlgebras));
    }
}
