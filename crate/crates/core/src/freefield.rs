//! Free-field vertex (super)algebra specifications.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::fock::{FieldElement, Leg, Monomial};
use crate::scalars::{ExtScalar, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FreeFieldError {
    #[error("parameter k={k} does not match the parity required by {kind:?}")]
    InvalidFamilyParameter { kind: Family, k: u32 },
    #[error("W-free(sl_n) needs n >= 3, got {0}")]
    TooSmall(u32),
    #[error("invalid generator: {0}")]
    InvalidGenerator(String),
    #[error("invalid pairing: {0}")]
    InvalidPairing(String),
    #[error("unknown generator {0}")]
    UnknownGenerator(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }
}

/// The four standard families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    OEv,
    SEv,
    SOdd,
    OOdd,
}

impl Family {
    pub fn parse(s: &str) -> Option<Family> {
        match s.to_ascii_lowercase().as_str() {
            "oev" | "o_ev" => Some(Family::OEv),
            "sev" | "s_ev" => Some(Family::SEv),
            "sodd" | "s_odd" => Some(Family::SOdd),
            "oodd" | "o_odd" => Some(Family::OOdd),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub name: String,
    pub parity: Parity,
    pub weight2x: u32,
    pub z2sign: i8,
}

impl GeneratorSpec {
    pub fn new(name: impl Into<String>, parity: Parity, weight2x: u32, z2sign: i8) -> Self {
        GeneratorSpec { name: name.into(), parity, weight2x, z2sign }
    }
}

#[derive(Serialize, Deserialize)]
struct SpecJson {
    generators: Vec<GeneratorSpec>,
    pairing: Vec<Vec<Rational>>,
}

/// Generators plus a central pairing g(z)h(w) ~ M[g,h](z−w)^{−(wt g + wt h)}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeFieldSpec {
    generators: Vec<GeneratorSpec>,
    pairing: Vec<Vec<Rational>>,
    partners: Vec<Vec<(u16, Rational)>>,
}

impl FreeFieldSpec {
    pub fn new(generators: Vec<GeneratorSpec>, pairing: Vec<Vec<Rational>>) -> Result<Self, FreeFieldError> {
        let n = generators.len();
        if n > 64 {
            return Err(FreeFieldError::InvalidGenerator("at most 64 generators are supported".into()));
        }
        for (i, g) in generators.iter().enumerate() {
            if g.weight2x == 0 {
                return Err(FreeFieldError::InvalidGenerator(format!("{} has weight 0", g.name)));
            }
            if g.z2sign != 1 && g.z2sign != -1 {
                return Err(FreeFieldError::InvalidGenerator(format!("{} has z2sign {}", g.name, g.z2sign)));
            }
            if generators[..i].iter().any(|h| h.name == g.name) {
                return Err(FreeFieldError::InvalidGenerator(format!("duplicate name {}", g.name)));
            }
        }
        if pairing.len() != n || pairing.iter().any(|r| r.len() != n) {
            return Err(FreeFieldError::InvalidPairing("matrix must be square of generator count".into()));
        }
        let mut partners = vec![Vec::new(); n];
        for (gi, g) in generators.iter().enumerate() {
            for (hi, h) in generators.iter().enumerate() {
                let m = &pairing[gi][hi];
                if m.is_zero() {
                    if !pairing[hi][gi].is_zero() {
                        return Err(FreeFieldError::InvalidPairing(format!("{}/{} pairing is one-sided", g.name, h.name)));
                    }
                    continue;
                }
                if g.weight2x != h.weight2x {
                    return Err(FreeFieldError::InvalidPairing(format!("{} and {} have different weights", g.name, h.name)));
                }
                if g.parity != h.parity {
                    return Err(FreeFieldError::InvalidPairing(format!("{} and {} have different parity", g.name, h.name)));
                }
                if g.z2sign != h.z2sign {
                    return Err(FreeFieldError::InvalidPairing(format!("{} and {} have different z2 signs", g.name, h.name)));
                }
                let k = (g.weight2x + h.weight2x) / 2;
                let odd = g.parity.is_odd() as u32;
                let sign = if (odd + k).is_multiple_of(2) { Rational::one() } else { -Rational::one() };
                if pairing[hi][gi] != &sign * m {
                    return Err(FreeFieldError::InvalidPairing(format!(
                        "{}/{} violates the supersymmetry sign law",
                        g.name, h.name
                    )));
                }
                partners[gi].push((hi as u16, m.clone()));
            }
        }
        Ok(FreeFieldSpec { generators, pairing, partners })
    }

    pub fn generators(&self) -> &[GeneratorSpec] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generator(&self, i: usize) -> &GeneratorSpec {
        &self.generators[i]
    }

    pub fn pairing(&self, g: usize, h: usize) -> &Rational {
        &self.pairing[g][h]
    }

    pub fn pairing_matrix(&self) -> &[Vec<Rational>] {
        &self.pairing
    }

    pub(crate) fn partners(&self, g: usize) -> &[(u16, Rational)] {
        &self.partners[g]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }

    pub fn weight2x(&self, g: usize) -> u32 {
        self.generators[g].weight2x
    }

    pub fn is_odd(&self, g: usize) -> bool {
        self.generators[g].parity.is_odd()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(SpecJson { generators: self.generators.clone(), pairing: self.pairing.clone() })
            .expect("spec serializes")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, FreeFieldError> {
        let s: SpecJson =
            serde_json::from_value(v.clone()).map_err(|e| FreeFieldError::InvalidPairing(e.to_string()))?;
        FreeFieldSpec::new(s.generators, s.pairing)
    }

    /// Hex SHA-256 of the canonical JSON form; keys the on-disk caches.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(&self.to_json()).expect("spec serializes");
        let digest = Sha256::digest(text.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Sub-spec on the generators accepted by `keep`, order preserved.
    pub fn restrict(&self, keep: impl Fn(&GeneratorSpec) -> bool) -> FreeFieldSpec {
        let idx: Vec<usize> = (0..self.len()).filter(|&i| keep(&self.generators[i])).collect();
        let gens = idx.iter().map(|&i| self.generators[i].clone()).collect();
        let pairing = idx.iter().map(|&i| idx.iter().map(|&j| self.pairing[i][j].clone()).collect()).collect();
        FreeFieldSpec::new(gens, pairing).expect("restriction of a valid spec")
    }

    /// Copy with every pairing entry of generator `g` (row and column) multiplied by `s`.
    pub fn rescaled(&self, factors: &[Rational]) -> FreeFieldSpec {
        let mut p = self.pairing.clone();
        for (i, row) in p.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = &(&*v * &factors[i]) * &factors[j];
            }
        }
        FreeFieldSpec::new(self.generators.clone(), p).expect("rescaling keeps the sign law")
    }
}

/// Tensor product; generator names must be disjoint.
pub fn tensor(a: &FreeFieldSpec, b: &FreeFieldSpec) -> Result<FreeFieldSpec, FreeFieldError> {
    let n = a.len() + b.len();
    let mut gens = a.generators.clone();
    gens.extend(b.generators.iter().cloned());
    let mut pairing = vec![vec![Rational::zero(); n]; n];
    for (row, src) in pairing.iter_mut().zip(&a.pairing) {
        row[..a.len()].clone_from_slice(src);
    }
    for (row, src) in pairing[a.len()..].iter_mut().zip(&b.pairing) {
        row[a.len()..].clone_from_slice(src);
    }
    FreeFieldSpec::new(gens, pairing)
}

pub fn make_standard_algebra(kind: Family, n: u32, k: u32) -> Result<FreeFieldSpec, FreeFieldError> {
    let k_even = k.is_multiple_of(2);
    let ok = match kind {
        Family::OEv | Family::SOdd => k_even,
        Family::SEv | Family::OOdd => !k_even,
    };
    if !ok || k == 0 {
        return Err(FreeFieldError::InvalidFamilyParameter { kind, k });
    }
    if n == 0 {
        return Err(FreeFieldError::InvalidGenerator("rank must be positive".into()));
    }
    let n = n as usize;
    let (parity, symplectic) = match kind {
        Family::OEv => (Parity::Even, false),
        Family::SEv => (Parity::Even, true),
        Family::SOdd => (Parity::Odd, true),
        Family::OOdd => (Parity::Odd, false),
    };
    let mut gens = Vec::new();
    if symplectic {
        let (x, y) = if parity == Parity::Even { ("beta", "gamma") } else { ("b", "c") };
        for i in 1..=n {
            gens.push(GeneratorSpec::new(format!("{x}{i}"), parity, k, 1));
            gens.push(GeneratorSpec::new(format!("{y}{i}"), parity, k, 1));
        }
    } else {
        let x = if parity == Parity::Even { "a" } else { "phi" };
        for i in 1..=n {
            gens.push(GeneratorSpec::new(format!("{x}{i}"), parity, k, 1));
        }
    }
    let m = gens.len();
    let mut pairing = vec![vec![Rational::zero(); m]; m];
    if symplectic {
        for i in 0..n {
            pairing[2 * i][2 * i + 1] = Rational::one();
            pairing[2 * i + 1][2 * i] = -Rational::one();
        }
    } else {
        for (i, row) in pairing.iter_mut().enumerate() {
            row[i] = Rational::one();
        }
    }
    FreeFieldSpec::new(gens, pairing)
}

/// Free-field limit of W^k(sl_n): flavors W2..Wn, unit diagonal pairing, θ-sign (−1)^i.
pub fn wfree_sln(n: u32) -> Result<FreeFieldSpec, FreeFieldError> {
    if n < 3 {
        return Err(FreeFieldError::TooSmall(n));
    }
    let gens: Vec<GeneratorSpec> = (2..=n)
        .map(|i| GeneratorSpec::new(format!("W{i}"), Parity::Even, 2 * i, if i % 2 == 0 { 1 } else { -1 }))
        .collect();
    let m = gens.len();
    let pairing = (0..m).map(|i| (0..m).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect()).collect();
    FreeFieldSpec::new(gens, pairing)
}

/// Rank-d Heisenberg algebra with generators alpha<f> for the given odd flavors f.
pub fn heisenberg(flavors: &[u32]) -> FreeFieldSpec {
    let gens: Vec<GeneratorSpec> =
        flavors.iter().map(|f| GeneratorSpec::new(format!("alpha{f}"), Parity::Even, 2, -1)).collect();
    let m = gens.len();
    let pairing = (0..m).map(|i| (0..m).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect()).collect();
    FreeFieldSpec::new(gens, pairing).expect("valid Heisenberg spec")
}

/// Leg-to-leg embedding: source generator g maps to `coeff · ∂^shift (target generator)`.
#[derive(Debug, Clone)]
pub struct EmbeddingMap {
    pub source: Arc<FreeFieldSpec>,
    pub target: Arc<FreeFieldSpec>,
    images: Vec<(usize, u16, ExtScalar)>,
}

impl EmbeddingMap {
    pub fn image(&self, g: usize) -> FieldElement<ExtScalar> {
        let (t, shift, c) = &self.images[g];
        FieldElement::leg(&self.target, *t, *shift).scale(c)
    }

    pub(crate) fn leg_image(&self, g: usize) -> &(usize, u16, ExtScalar) {
        &self.images[g]
    }

    pub fn source_index_for_target(&self, t: usize) -> Option<usize> {
        self.images.iter().position(|(tt, _, _)| *tt == t)
    }

    /// Image of an element over any spec whose generator names are found in `source`.
    pub fn apply(&self, x: &FieldElement) -> Result<FieldElement<ExtScalar>, FreeFieldError> {
        let spec = x.spec();
        let mut out = FieldElement::zero(&self.target);
        for (m, c) in x.terms() {
            let mut coeff = ExtScalar::from_rational(c.clone());
            let mut legs = Vec::with_capacity(m.len());
            for leg in m.legs() {
                let name = &spec.generator(leg.gen as usize).name;
                let g = self.source.index_of(name).ok_or_else(|| FreeFieldError::UnknownGenerator(name.clone()))?;
                let (t, shift, k) = &self.images[g];
                coeff = coeff.mul(k);
                legs.push(Leg { gen: *t as u16, der: leg.der + shift });
            }
            if let Some((mono, negative)) = Monomial::canonical(&self.target, legs) {
                let coeff = if negative { coeff.neg() } else { coeff };
                out = out.add(&FieldElement::from_monomial(&self.target, mono, coeff));
            }
        }
        Ok(out)
    }
}

/// The Heisenberg realisation of the odd flavors 2i+1 (i = 1..d): W^{2i+1} ↦ n_i^{-1} ∂^{2i} α^{2i+1},
/// together with ν = Σ :(∂²α^{2i+1}) α^{2i+1}:.
pub fn heisenberg_extension(d: u32) -> (Arc<FreeFieldSpec>, EmbeddingMap, FieldElement<ExtScalar>) {
    let flavors: Vec<u32> = (1..=d).map(|i| 2 * i + 1).collect();
    heisenberg_embedding(&flavors).expect("odd flavors")
}

/// Same construction over an arbitrary list of odd flavors. Repeated flavors get independent
/// copies, named W3, W3', W3'', … on the source side.
pub fn heisenberg_embedding(flavors: &[u32]) -> Result<(Arc<FreeFieldSpec>, EmbeddingMap, FieldElement<ExtScalar>), FreeFieldError> {
    if flavors.is_empty() || flavors.iter().any(|f| f % 2 == 0 || *f < 3) {
        return Err(FreeFieldError::InvalidGenerator("flavors must be odd and at least 3".into()));
    }
    let mut seen: std::collections::BTreeMap<u32, usize> = Default::default();
    let mut src = Vec::new();
    let mut tgt = Vec::new();
    for &f in flavors {
        let c = seen.entry(f).or_insert(0);
        let primes = "'".repeat(*c);
        *c += 1;
        src.push(GeneratorSpec::new(format!("W{f}{primes}"), Parity::Even, 2 * f, -1));
        tgt.push(GeneratorSpec::new(format!("alpha{f}{primes}"), Parity::Even, 2, -1));
    }
    let m = flavors.len();
    let id: Vec<Vec<Rational>> =
        (0..m).map(|i| (0..m).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect()).collect();
    let source = Arc::new(FreeFieldSpec::new(src, id.clone())?);
    let target = Arc::new(FreeFieldSpec::new(tgt, id)?);
    let images = flavors
        .iter()
        .enumerate()
        .map(|(t, f)| (t, (f - 1) as u16, ExtScalar::symbol_inverse((f - 1) / 2)))
        .collect();
    let mut nu = FieldElement::zero(&target);
    for t in 0..m {
        let a2 = FieldElement::<ExtScalar>::leg(&target, t, 2);
        let a0 = FieldElement::<ExtScalar>::leg(&target, t, 0);
        nu = nu.add(&a2.normal_order(&a0).expect("same algebra"));
    }
    Ok((target.clone(), EmbeddingMap { source, target, images }, nu))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sln_generators() {
        let s = wfree_sln(4).unwrap();
        let w: Vec<u32> = s.generators().iter().map(|g| g.weight2x / 2).collect();
        assert_eq!(w, vec![2, 3, 4]);
        let z: Vec<i8> = s.generators().iter().map(|g| g.z2sign).collect();
        assert_eq!(z, vec![1, -1, 1]);
        assert_eq!(wfree_sln(7).unwrap().len(), 6);
        assert_eq!(wfree_sln(2), Err(FreeFieldError::TooSmall(2)));
    }

    #[test]
    fn standard_families() {
        let h = make_standard_algebra(Family::OEv, 3, 2).unwrap();
        assert_eq!(h.len(), 3);
        assert_eq!(h.weight2x(0), 2);
        let bg = make_standard_algebra(Family::SEv, 1, 1).unwrap();
        assert_eq!(bg.pairing(0, 1), &Rational::one());
        assert_eq!(bg.pairing(1, 0), &-Rational::one());
        let ff = make_standard_algebra(Family::OOdd, 2, 1).unwrap();
        assert!(ff.is_odd(0));
        assert_eq!(ff.pairing(1, 1), &Rational::one());
        let bc = make_standard_algebra(Family::SOdd, 1, 2).unwrap();
        assert_eq!(bc.pairing(1, 0), &-Rational::one());
        assert!(matches!(
            make_standard_algebra(Family::OEv, 1, 3),
            Err(FreeFieldError::InvalidFamilyParameter { .. })
        ));
    }

    #[test]
    fn sign_law_enforced() {
        let g = vec![GeneratorSpec::new("x", Parity::Even, 2, 1), GeneratorSpec::new("y", Parity::Even, 2, 1)];
        let p = vec![vec![Rational::zero(), Rational::one()], vec![-Rational::one(), Rational::zero()]];
        assert!(matches!(FreeFieldSpec::new(g, p), Err(FreeFieldError::InvalidPairing(_))));
    }

    #[test]
    fn json_round_trip_and_hash() {
        let s = wfree_sln(5).unwrap();
        let back = FreeFieldSpec::from_json(&s.to_json()).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.hash(), s.hash());
        assert_ne!(s.hash(), wfree_sln(4).unwrap().hash());
    }

    #[test]
    fn even_and_odd_flavors_factor() {
        let s = wfree_sln(6).unwrap();
        let even = s.restrict(|g| g.z2sign == 1);
        let odd = s.restrict(|g| g.z2sign == -1);
        let t = tensor(&even, &odd).unwrap();
        let mut a: Vec<_> = t.generators().to_vec();
        let mut b: Vec<_> = s.generators().to_vec();
        a.sort_by(|x, y| x.name.cmp(&y.name));
        b.sort_by(|x, y| x.name.cmp(&y.name));
        assert_eq!(a, b);
        for g in 0..t.len() {
            let name = &t.generator(g).name;
            let h = s.index_of(name).unwrap();
            assert_eq!(t.pairing(g, g), s.pairing(h, h));
        }
    }
}
