//! Independent reference implementation: states are polynomials in creation modes
//! X_(−k−1) on the vacuum, products come from the Borcherds iterate formula and the
//! mode commutators [X^g_(p), X^h_(q)] = M[g,h]·C(p, K−1)·δ_{p+q, K−2}.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use vaw_core::fock::{FieldElement, Leg};
use vaw_core::freefield::FreeFieldSpec;
use vaw_core::scalars::Rational;

/// Creation modes (g, k) standing for X^g_(−k−1), kept sorted.
pub type Mono = Vec<(usize, u32)>;
pub type State = BTreeMap<Mono, Rational>;

pub struct Oracle {
    pub spec: Arc<FreeFieldSpec>,
}

fn binom(m: i64, j: u32) -> Rational {
    let mut r = Rational::one();
    for t in 0..j as i64 {
        r *= Rational::frac(m - t, t + 1);
    }
    r
}

fn fact(k: u32) -> Rational {
    Rational::factorial(k as u64)
}

fn add(s: &mut State, m: Mono, c: Rational) {
    if c.is_zero() {
        return;
    }
    let e = s.entry(m.clone()).or_insert_with(Rational::zero);
    *e = e.clone() + c;
    if e.is_zero() {
        s.remove(&m);
    }
}

impl Oracle {
    pub fn new(spec: &Arc<FreeFieldSpec>) -> Self {
        Oracle { spec: spec.clone() }
    }

    fn odd(&self, g: usize) -> bool {
        self.spec.is_odd(g)
    }

    /// Sort modes, returning the Koszul sign, or None if an odd mode repeats.
    fn canonical(&self, mut m: Mono) -> Option<(Mono, bool)> {
        let mut neg = false;
        for i in 1..m.len() {
            let mut j = i;
            while j > 0 && m[j - 1] > m[j] {
                if self.odd(m[j - 1].0) && self.odd(m[j].0) {
                    neg = !neg;
                }
                m.swap(j - 1, j);
                j -= 1;
            }
        }
        if m.windows(2).any(|w| w[0] == w[1] && self.odd(w[0].0)) {
            return None;
        }
        Some((m, neg))
    }

    fn weight2x_mono(&self, m: &Mono) -> i64 {
        m.iter().map(|&(g, k)| self.spec.weight2x(g) as i64 + 2 * k as i64).sum()
    }

    fn mono_odd(&self, m: &[(usize, u32)]) -> bool {
        m.iter().filter(|x| self.odd(x.0)).count() % 2 == 1
    }

    /// The mode X^g_(p) acting on a state.
    pub fn mode(&self, g: usize, p: i64, s: &State) -> State {
        let mut out = State::new();
        for (m, c) in s {
            if p < 0 {
                let mut legs = vec![(g, (-p - 1) as u32)];
                legs.extend(m.iter().copied());
                if let Some((mm, neg)) = self.canonical(legs) {
                    add(&mut out, mm, if neg { -c.clone() } else { c.clone() });
                }
                continue;
            }
            let mut passed_odd = false;
            for (i, &(h, k)) in m.iter().enumerate() {
                let pair = self.spec.pairing(g, h);
                let kk = (self.spec.weight2x(g) + self.spec.weight2x(h)) as i64 / 2;
                let q = -(k as i64) - 1;
                if !pair.is_zero() && p + q == kk - 2 && p >= kk - 1 {
                    let mut rest = m.clone();
                    rest.remove(i);
                    let mut coeff = c.clone() * pair.clone() * binom(p, (kk - 1) as u32);
                    if passed_odd && self.odd(g) {
                        coeff = -coeff;
                    }
                    add(&mut out, rest, coeff);
                }
                if self.odd(h) {
                    passed_odd = !passed_odd;
                }
            }
        }
        out
    }

    /// a_(n) b.
    pub fn product(&self, a: &State, n: i64, b: &State) -> State {
        let mut out = State::new();
        for (m, c) in a {
            for (k, v) in self.mono_product(m, n, b) {
                add(&mut out, k, v * c.clone());
            }
        }
        out
    }

    fn mono_product(&self, a: &Mono, n: i64, b: &State) -> State {
        if a.is_empty() {
            return if n == -1 { b.clone() } else { State::new() };
        }
        let (g, k) = a[0];
        let w: Mono = a[1..].to_vec();
        let ws: State = [(w.clone(), Rational::one())].into_iter().collect();
        let m = -(k as i64) - 1;
        let wb = b.keys().map(|x| self.weight2x_mono(x)).max().unwrap_or(0);
        let wu = self.spec.weight2x(g) as i64;
        let ww = self.weight2x_mono(&w);
        let j1 = (ww + wb) / 2 - 1 - n;
        let j2 = (wu + wb) / 2 - 1;
        let top = j1.max(j2).max(0) as u32 + 1;
        let sign_uw = if self.odd(g) && self.mono_odd(&w) { -1 } else { 1 };
        let sign_m = if m % 2 == 0 { 1 } else { -1 };
        let mut out = State::new();
        for j in 0..=top {
            let base = binom(m, j) * Rational::from(if j % 2 == 0 { 1 } else { -1 });
            if base.is_zero() {
                continue;
            }
            let t1 = self.mode(g, m - j as i64, &self.product(&ws, n + j as i64, b));
            for (x, v) in t1 {
                add(&mut out, x, v * base.clone());
            }
            let t2 = self.product(&ws, m + n - j as i64, &self.mode(g, j as i64, b));
            let s2 = base.clone() * Rational::from(-(sign_m * sign_uw) as i64);
            for (x, v) in t2 {
                add(&mut out, x, v * s2.clone());
            }
        }
        out
    }

    /// Translation T, with T X_(−k−1) = (k+1) X_(−k−2) and T|0⟩ = 0.
    pub fn derivative(&self, s: &State) -> State {
        let mut out = State::new();
        for (m, c) in s {
            for i in 0..m.len() {
                let mut mm = m.clone();
                mm[i].1 += 1;
                let f = Rational::from(m[i].1 as i64 + 1);
                if let Some((x, neg)) = self.canonical(mm) {
                    add(&mut out, x, if neg { -(c.clone() * f) } else { c.clone() * f });
                }
            }
        }
        out
    }

    pub fn state_of(&self, x: &FieldElement) -> State {
        let mut out = State::new();
        for (m, c) in x.terms() {
            let legs: Mono = m.legs().iter().map(|l| (l.gen as usize, l.der as u32)).collect();
            let scale = legs.iter().fold(Rational::one(), |acc, &(_, k)| acc * fact(k));
            if let Some((mm, neg)) = self.canonical(legs) {
                let v = c.clone() * scale;
                add(&mut out, mm, if neg { -v } else { v });
            }
        }
        out
    }

    pub fn to_element(&self, s: &State) -> FieldElement {
        let mut out = FieldElement::zero(&self.spec);
        for (m, c) in s {
            let legs: Vec<Leg> = m.iter().map(|&(g, k)| Leg::new(g, k as u16)).collect();
            let scale = m.iter().fold(Rational::one(), |acc, &(_, k)| acc * fact(k));
            out = out.add(&FieldElement::from_legs(&self.spec, &legs, c.clone() / scale));
        }
        out
    }

    pub fn nth_product(&self, a: &FieldElement, n: i64, b: &FieldElement) -> FieldElement {
        self.to_element(&self.product(&self.state_of(a), n, &self.state_of(b)))
    }

    pub fn normal_order(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        self.nth_product(a, -1, b)
    }

    pub fn derivative_of(&self, a: &FieldElement) -> FieldElement {
        self.to_element(&self.derivative(&self.state_of(a)))
    }

    /// :∂^a W^f1 ∂^b W^f2: built from modes alone.
    pub fn quadratic(&self, f1: u32, a: u32, f2: u32, b: u32) -> FieldElement {
        let g1 = self.spec.index_of(&format!("W{f1}")).expect("flavor");
        let g2 = self.spec.index_of(&format!("W{f2}")).expect("flavor");
        let s = State::from([(vec![], Rational::one())]);
        let inner = self.mode(g2, -(b as i64) - 1, &s);
        let st = self.mode(g1, -(a as i64) - 1, &inner);
        let c = fact(a) * fact(b);
        self.to_element(&st.into_iter().map(|(m, v)| (m, v * c.clone())).collect())
    }

    pub fn u(&self, i: u32, j: u32, a: u32, b: u32) -> FieldElement {
        self.quadratic(2 * i + 1, a, 2 * j + 1, b)
    }
}

/// Reduced rational from a pair.
pub fn q(a: i64, b: i64) -> Rational {
    Rational::frac(a, b)
}
