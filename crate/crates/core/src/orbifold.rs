//! The Z2 action, the quadratic invariants U^{2i+1,2j+1}_{a,b}, and generator catalogs.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fock::FieldElement;
use crate::freefield::FreeFieldSpec;
use crate::linalg;
use crate::scalars::{Coeff, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrbifoldError {
    #[error("unknown generator {0}")]
    UnknownGenerator(String),
    #[error("span mismatch: {0}")]
    SpanMismatch(String),
    #[error("unsupported catalog: {0}")]
    UnsupportedCatalog(String),
    #[error("invalid index: {0}")]
    InvalidIndex(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sector {
    Invariant,
    AntiInvariant,
    Full,
}

impl Sector {
    pub fn admits(self, z2sign: i8) -> bool {
        match self {
            Sector::Invariant => z2sign == 1,
            Sector::AntiInvariant => z2sign == -1,
            Sector::Full => true,
        }
    }

    pub fn parse(s: &str) -> Option<Sector> {
        match s {
            "invariant" => Some(Sector::Invariant),
            "anti-invariant" => Some(Sector::AntiInvariant),
            "full" => Some(Sector::Full),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Sector::Invariant => "invariant",
            Sector::AntiInvariant => "anti-invariant",
            Sector::Full => "full",
        }
    }
}

/// θ: multiply each monomial by the product of its legs' signs.
pub fn theta<C: Coeff>(x: &FieldElement<C>) -> FieldElement<C> {
    let spec = x.spec();
    FieldElement::from_terms(
        spec,
        x.terms().map(|(m, c)| (m.clone(), if m.z2sign(spec) == 1 { c.clone() } else { c.neg_ref() })),
    )
}

/// Index of U^{2i+1,2j+1}_{a,b}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct UIndex {
    pub i: u32,
    pub j: u32,
    pub a: u32,
    pub b: u32,
}

impl UIndex {
    pub fn new(i: u32, j: u32, a: u32, b: u32) -> Result<Self, OrbifoldError> {
        if i == 0 || j < i {
            return Err(OrbifoldError::InvalidIndex(format!("U({i},{j},{a},{b}) needs 1 <= i <= j")));
        }
        Ok(UIndex { i, j, a, b })
    }

    pub fn weight(&self) -> u32 {
        2 * self.i + 2 * self.j + self.a + self.b + 2
    }
}

impl fmt::Display for UIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "U({},{},{},{})", self.i, self.j, self.a, self.b)
    }
}

fn flavor(spec: &FreeFieldSpec, f: u32) -> Result<usize, OrbifoldError> {
    let name = format!("W{f}");
    spec.index_of(&name).ok_or(OrbifoldError::UnknownGenerator(name))
}

/// :(∂^a W^{f1})(∂^b W^{f2}): for any two flavors.
pub fn quadratic(spec: &Arc<FreeFieldSpec>, f1: u32, a: u32, f2: u32, b: u32) -> Result<FieldElement, OrbifoldError> {
    let x = FieldElement::leg(spec, flavor(spec, f1)?, a as u16);
    let y = FieldElement::leg(spec, flavor(spec, f2)?, b as u16);
    Ok(x.normal_order(&y).expect("same algebra"))
}

/// U^{2i+1,2j+1}_{a,b}; the flavor order is taken as given, so i > j is allowed here.
pub fn u_field(spec: &Arc<FreeFieldSpec>, i: u32, j: u32, a: u32, b: u32) -> Result<FieldElement, OrbifoldError> {
    quadratic(spec, 2 * i + 1, a, 2 * j + 1, b)
}

pub fn u(idx: UIndex, spec: &Arc<FreeFieldSpec>) -> Result<FieldElement, OrbifoldError> {
    u_field(spec, idx.i, idx.j, idx.a, idx.b)
}

/// Families spanning one space, with exact change of basis between each pair.
#[derive(Debug, Clone)]
pub struct SpanRewrite {
    pub families: Vec<(String, Vec<FieldElement>)>,
    /// (from, to, M) with family[from][r] = Σ_c M[r][c] family[to][c].
    pub matrices: Vec<(usize, usize, Vec<Vec<Rational>>)>,
    pub dimension: usize,
}

/// For i < j: {U_{a,m−a}}, {∂^a U_{0,m−a}}, {∂^a U_{m−a,0}}. For i = j, m counts derivatives:
/// {U_{a,m−a} : a ≤ m−a} against {∂^{m−2b} U_{0,2b}}.
pub fn rewrite_spans(i: u32, j: u32, m: u32, spec: &Arc<FreeFieldSpec>) -> Result<SpanRewrite, OrbifoldError> {
    if i == 0 || j < i {
        return Err(OrbifoldError::InvalidIndex(format!("rewrite_spans needs 1 <= i <= j, got ({i},{j})")));
    }
    let families = if i < j {
        let f1 = (0..=m).map(|a| u_field(spec, i, j, a, m - a)).collect::<Result<Vec<_>, _>>()?;
        let f2 = (0..=m).map(|a| Ok(u_field(spec, i, j, 0, m - a)?.derivative_k(a))).collect::<Result<Vec<_>, OrbifoldError>>()?;
        let f3 = (0..=m).map(|a| Ok(u_field(spec, i, j, m - a, 0)?.derivative_k(a))).collect::<Result<Vec<_>, OrbifoldError>>()?;
        vec![("U_{a,m-a}".to_string(), f1), ("D^a U_{0,m-a}".to_string(), f2), ("D^a U_{m-a,0}".to_string(), f3)]
    } else {
        let f1 = (0..=m / 2).map(|a| u_field(spec, i, i, a, m - a)).collect::<Result<Vec<_>, _>>()?;
        let f2 = (0..=m / 2)
            .map(|b| Ok(u_field(spec, i, i, 0, 2 * b)?.derivative_k(m - 2 * b)))
            .collect::<Result<Vec<_>, OrbifoldError>>()?;
        vec![("U_{a,m-a}".to_string(), f1), ("D^{m-2b} U_{0,2b}".to_string(), f2)]
    };
    let dims: Vec<usize> = families.iter().map(|(_, f)| linalg::rank(f)).collect();
    let expected = families[0].1.len();
    if dims.iter().any(|&d| d != expected) {
        return Err(OrbifoldError::SpanMismatch(format!("family ranks {dims:?}, expected {expected}")));
    }
    let mut matrices = Vec::new();
    for from in 0..families.len() {
        for to in 0..families.len() {
            if from == to {
                continue;
            }
            let m = linalg::express(&families[from].1, &families[to].1)
                .ok_or_else(|| OrbifoldError::SpanMismatch(format!("family {from} not inside family {to}")))?;
            matrices.push((from, to, m));
        }
    }
    Ok(SpanRewrite { families, matrices, dimension: expected })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CatalogKind {
    Long,
    StrongFree,
    WeakFree,
    MinimalSl7Free,
}

impl CatalogKind {
    pub fn parse(s: &str) -> Option<CatalogKind> {
        match s {
            "long" => Some(CatalogKind::Long),
            "strong-free" => Some(CatalogKind::StrongFree),
            "weak-free" => Some(CatalogKind::WeakFree),
            "minimal-sl7-free" => Some(CatalogKind::MinimalSl7Free),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CatalogKind::Long => "long",
            CatalogKind::StrongFree => "strong-free",
            CatalogKind::WeakFree => "weak-free",
            CatalogKind::MinimalSl7Free => "minimal-sl7-free",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Recipe {
    /// The generator W^f (f = 2 is L).
    W { flavor: u32 },
    U(UIndex),
}

impl Recipe {
    pub fn weight(&self) -> u32 {
        match self {
            Recipe::W { flavor } => *flavor,
            Recipe::U(u) => u.weight(),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Recipe::W { flavor: 2 } => "L".to_string(),
            Recipe::W { flavor } => format!("W{flavor}"),
            Recipe::U(u) => u.to_string(),
        }
    }

    pub fn instantiate(&self, spec: &Arc<FreeFieldSpec>) -> Result<FieldElement, OrbifoldError> {
        match self {
            Recipe::W { flavor: f } => Ok(FieldElement::generator(spec, flavor(spec, *f)?)),
            Recipe::U(idx) => u(*idx, spec),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub label: String,
    pub weight: u32,
    pub recipe: Recipe,
    /// Marks free-limit extras that the interacting algebra does not need.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub free_limit_extra: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Catalog {
    pub kind: CatalogKind,
    /// `None` for the stable (n → ∞) lists.
    pub n: Option<u32>,
    pub entries: Vec<CatalogEntry>,
}

impl Catalog {
    pub fn from_recipes(kind: CatalogKind, n: Option<u32>, recipes: Vec<(Recipe, bool)>) -> Catalog {
        let mut entries: Vec<CatalogEntry> = recipes
            .into_iter()
            .map(|(r, extra)| CatalogEntry { label: r.label(), weight: r.weight(), recipe: r, free_limit_extra: extra })
            .collect();
        entries.sort_by_key(|e| (e.weight, e.recipe));
        entries.dedup_by(|a, b| a.recipe == b.recipe);
        Catalog { kind, n, entries }
    }

    pub fn custom(recipes: Vec<Recipe>) -> Catalog {
        Catalog::from_recipes(CatalogKind::Long, None, recipes.into_iter().map(|r| (r, false)).collect())
    }

    pub fn truncated(&self, bound: u32) -> Catalog {
        Catalog {
            kind: self.kind,
            n: self.n,
            entries: self.entries.iter().filter(|e| e.weight <= bound).cloned().collect(),
        }
    }

    pub fn without_extras(&self) -> Catalog {
        Catalog { kind: self.kind, n: self.n, entries: self.entries.iter().filter(|e| !e.free_limit_extra).cloned().collect() }
    }

    pub fn instantiate(&self, spec: &Arc<FreeFieldSpec>) -> Result<Vec<FieldElement>, OrbifoldError> {
        self.entries.iter().map(|e| e.recipe.instantiate(spec)).collect()
    }

    pub fn weights(&self) -> Vec<u32> {
        self.entries.iter().map(|e| e.weight).collect()
    }

    pub fn type_string(&self) -> String {
        let mut counts = std::collections::BTreeMap::new();
        for e in &self.entries {
            *counts.entry(e.weight).or_insert(0u64) += 1;
        }
        type_string(&counts)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("catalog serializes")
    }
}

/// Renders weight counts as "W(2,4,6^2,...)".
pub fn type_string(counts: &std::collections::BTreeMap<u32, u64>) -> String {
    let parts: Vec<String> = counts
        .iter()
        .filter(|(_, &c)| c > 0)
        .map(|(w, &c)| if c == 1 { w.to_string() } else { format!("{w}^{c}") })
        .collect();
    format!("W({})", parts.join(","))
}

fn w(f: u32) -> Recipe {
    Recipe::W { flavor: f }
}

fn ux(i: u32, j: u32, a: u32, b: u32) -> Recipe {
    Recipe::U(UIndex { i, j, a, b })
}

/// Long strong generating list with flavors up to `max_flavor`, entries of weight ≤ `bound`.
pub fn long_catalog(max_flavor: u32, bound: u32) -> Vec<Recipe> {
    let mut out = vec![w(2)];
    for f in (4..=max_flavor).step_by(2) {
        out.push(w(f));
    }
    let odd: Vec<u32> = (1..).take_while(|i| 2 * i < max_flavor).collect();
    for &i in &odd {
        for a in (0..).step_by(2).take_while(|a| 4 * i + 2 + a <= bound) {
            out.push(ux(i, i, 0, a));
        }
        for &j in odd.iter().filter(|&&j| j > i) {
            for a in (0..).take_while(|a| 2 * i + 2 * j + 2 + a <= bound) {
                out.push(ux(i, j, 0, a));
            }
        }
    }
    out.retain(|r| r.weight() <= bound);
    out
}

/// Minimal strong generators in the free limit, flavors up to `max_flavor`.
pub fn strong_free_recipes(max_flavor: u32) -> Vec<Recipe> {
    let mut out = vec![w(2)];
    for f in (4..=max_flavor).step_by(2) {
        out.push(w(f));
    }
    let odd: Vec<u32> = (1..).take_while(|i| 2 * i < max_flavor).collect();
    if odd.contains(&1) {
        for a in 0..=3 {
            out.push(ux(1, 1, 0, 2 * a));
        }
    }
    for &i in odd.iter().filter(|&&i| i >= 2) {
        for a in 0..=6 {
            out.push(ux(1, i, 0, a));
        }
        for a in 0..=2 {
            out.push(ux(i, i, 0, 2 * a));
        }
        for &j in odd.iter().filter(|&&j| j > i) {
            for a in 0..=5 {
                out.push(ux(i, j, 0, a));
            }
        }
    }
    out
}

pub fn weak_free_recipes(max_flavor: u32) -> Vec<Recipe> {
    let mut out = vec![w(2)];
    for f in (4..=max_flavor).step_by(2) {
        out.push(w(f));
    }
    for i in (1..).take_while(|i| 2 * i < max_flavor) {
        out.push(ux(1, i, 0, 0));
    }
    out
}

/// Generic-level minimal list for sl_7 plus the flagged free-limit extras.
pub fn minimal_sl7_recipes() -> Vec<(Recipe, bool)> {
    let mut out: Vec<(Recipe, bool)> = vec![(w(2), false), (w(4), false), (w(6), false)];
    let plain = |v: &mut Vec<(Recipe, bool)>, r: Recipe| v.push((r, false));
    for a in 0..=3 {
        plain(&mut out, ux(1, 1, 0, 2 * a));
    }
    for a in 0..=6 {
        plain(&mut out, ux(1, 2, 0, a));
    }
    for a in 0..=5 {
        plain(&mut out, ux(1, 3, 0, a));
    }
    for a in 0..=2 {
        plain(&mut out, ux(2, 2, 0, 2 * a));
    }
    for a in 0..=3 {
        plain(&mut out, ux(2, 3, 0, a));
    }
    for a in 0..=1 {
        plain(&mut out, ux(3, 3, 0, 2 * a));
    }
    for r in [ux(1, 3, 0, 6), ux(2, 3, 0, 4), ux(2, 3, 0, 5), ux(3, 3, 0, 4)] {
        out.push((r, true));
    }
    out
}

/// Catalogs for W-free(sl_n), or the stable lists when `n` is `None` (then `bound` is required).
pub fn generator_catalog(n: Option<u32>, kind: CatalogKind, bound: Option<u32>) -> Result<Catalog, OrbifoldError> {
    let unsupported = |m: &str| Err(OrbifoldError::UnsupportedCatalog(m.to_string()));
    let flavor_cap = match (n, bound) {
        (Some(n), _) if n < 4 => return unsupported("catalogs need n >= 4"),
        (Some(n), _) => n,
        (None, Some(b)) => b,
        (None, None) => return unsupported("stable catalogs need a weight bound"),
    };
    let mut cat = match kind {
        CatalogKind::Long => {
            let Some(b) = bound else { return unsupported("the long catalog needs a weight bound") };
            Catalog::from_recipes(kind, n, long_catalog(flavor_cap, b).into_iter().map(|r| (r, false)).collect())
        }
        CatalogKind::StrongFree => {
            Catalog::from_recipes(kind, n, strong_free_recipes(flavor_cap).into_iter().map(|r| (r, false)).collect())
        }
        CatalogKind::WeakFree => {
            Catalog::from_recipes(kind, n, weak_free_recipes(flavor_cap).into_iter().map(|r| (r, false)).collect())
        }
        CatalogKind::MinimalSl7Free => {
            if n != Some(7) {
                return unsupported("minimal-sl7-free requires n = 7");
            }
            Catalog::from_recipes(kind, n, minimal_sl7_recipes())
        }
    };
    if let Some(b) = bound {
        cat = cat.truncated(b);
    }
    Ok(cat)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freefield::wfree_sln;

    fn sl(n: u32) -> Arc<FreeFieldSpec> {
        Arc::new(wfree_sln(n).unwrap())
    }

    #[test]
    fn theta_examples() {
        let s = sl(4);
        let w3: FieldElement = FieldElement::generator(&s, 1);
        assert_eq!(theta(&w3), w3.neg());
        let u00 = u(UIndex::new(1, 1, 0, 0).unwrap(), &s).unwrap();
        assert_eq!(theta(&u00), u00);
        let l: FieldElement = FieldElement::generator(&s, 0);
        let lw = l.normal_order(&w3).unwrap();
        assert_eq!(theta(&lw), lw.neg());
    }

    #[test]
    fn u_rewrites() {
        let s = sl(4);
        let half = Rational::frac(1, 2);
        let u00 = u_field(&s, 1, 1, 0, 0).unwrap();
        assert_eq!(u_field(&s, 1, 1, 0, 1).unwrap(), u00.derivative().scale_rational(&half));
        let rhs = u_field(&s, 1, 1, 0, 2).unwrap().neg().add(&u00.derivative_k(2).scale_rational(&half));
        assert_eq!(u_field(&s, 1, 1, 1, 1).unwrap(), rhs);
        assert_eq!(UIndex::new(1, 2, 2, 1).unwrap().weight(), 11);
        assert!(matches!(u_field(&s, 1, 2, 0, 0), Err(OrbifoldError::UnknownGenerator(_))));
    }

    #[test]
    fn u22_rewrite_needs_fourth_derivative() {
        let s = sl(4);
        let u22 = u_field(&s, 1, 1, 2, 2).unwrap();
        let u04 = u_field(&s, 1, 1, 0, 4).unwrap();
        let u02 = u_field(&s, 1, 1, 0, 2).unwrap();
        let u00 = u_field(&s, 1, 1, 0, 0).unwrap();
        let derived = u04
            .sub(&u02.derivative_k(2).scale_rational(&Rational::from(2)))
            .add(&u00.derivative_k(4).scale_rational(&Rational::frac(1, 2)));
        assert_eq!(u22, derived);
    }

    #[test]
    fn span_rewrites() {
        let s = sl(5);
        let r = rewrite_spans(1, 2, 1, &s).unwrap();
        assert_eq!(r.dimension, 2);
        assert_eq!(r.families.len(), 3);
        let even = rewrite_spans(1, 1, 0, &s).unwrap();
        assert_eq!(even.matrices[0].2, vec![vec![Rational::one()]]);
        let odd = rewrite_spans(1, 1, 1, &s).unwrap();
        let m = odd.matrices.iter().find(|(f, t, _)| *f == 0 && *t == 1).unwrap();
        assert_eq!(m.2, vec![vec![Rational::frac(1, 2)]]);
        for m in 0..6 {
            rewrite_spans(1, 2, m, &s).unwrap();
            rewrite_spans(2, 2, m, &s).unwrap();
        }
    }

    #[test]
    fn catalogs() {
        let c = generator_catalog(Some(4), CatalogKind::StrongFree, None).unwrap();
        assert_eq!(c.weights(), vec![2, 4, 6, 8, 10, 12]);
        assert_eq!(c.type_string(), "W(2,4,6,8,10,12)");
        let labels: Vec<_> = generator_catalog(Some(5), CatalogKind::WeakFree, None)
            .unwrap()
            .entries
            .iter()
            .map(|e| e.label.clone())
            .collect();
        assert_eq!(labels, vec!["L", "W4", "U(1,1,0,0)", "U(1,2,0,0)"]);
        let c5 = generator_catalog(Some(5), CatalogKind::StrongFree, None).unwrap();
        assert_eq!(c5.type_string(), "W(2,4,6,8^2,9,10^3,11,12^3,13,14^2)");
        let m7 = generator_catalog(Some(7), CatalogKind::MinimalSl7Free, None).unwrap();
        let w16: Vec<_> = m7.entries.iter().filter(|e| e.weight == 16 && !e.free_limit_extra).collect();
        assert_eq!(w16.len(), 1);
        assert_eq!(w16[0].label, "U(3,3,0,2)");
        let extras: Vec<_> = m7.entries.iter().filter(|e| e.free_limit_extra).map(|e| e.label.clone()).collect();
        assert_eq!(extras, vec!["U(1,3,0,6)", "U(2,3,0,4)", "U(2,3,0,5)", "U(3,3,0,4)"]);
        assert!(generator_catalog(Some(6), CatalogKind::MinimalSl7Free, None).is_err());
    }

    #[test]
    fn catalog_entries_are_invariant() {
        let s = sl(7);
        for kind in [CatalogKind::StrongFree, CatalogKind::WeakFree, CatalogKind::MinimalSl7Free] {
            let c = generator_catalog(Some(7), kind, None).unwrap();
            for (e, x) in c.entries.iter().zip(c.instantiate(&s).unwrap()) {
                assert_eq!(theta(&x), x);
                assert_eq!(x.weight2x(), Some(2 * e.weight));
            }
        }
    }
}
