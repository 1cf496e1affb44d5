use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde_json::json;

use super::basis::basis_with;
use super::basis::BasisCache;
use super::RelationsError;
use crate::fock::FieldElement;
use crate::freefield::FreeFieldSpec;
use crate::linalg::{ColumnIndex, Echelon};
use crate::orbifold::{Catalog, Sector};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightStatus {
    pub weight2x: u32,
    pub reached: usize,
    pub full: usize,
}

impl WeightStatus {
    pub fn saturated(&self) -> bool {
        self.reached == self.full
    }
}

#[derive(Debug, Clone)]
pub struct ClosureReport {
    pub weights: Vec<WeightStatus>,
    pub rounds: usize,
    /// No new elements appeared in the last round.
    pub stable: bool,
}

impl ClosureReport {
    pub fn saturated(&self) -> bool {
        self.weights.iter().all(|w| w.saturated())
    }

    pub fn weight(&self, w: u32) -> Option<&WeightStatus> {
        self.weights.iter().find(|s| s.weight2x == 2 * w)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let half = |k: u32| if k.is_multiple_of(2) { json!(k / 2) } else { json!(format!("{k}/2")) };
        json!({
            "schema": "1",
            "weights": self.weights.iter().map(|w| json!({
                "weight": half(w.weight2x),
                "dimension": w.reached,
                "full": w.full,
                "saturated": w.saturated(),
            })).collect::<Vec<_>>(),
            "rounds": self.rounds,
            "stable": self.stable,
            "saturated": self.saturated(),
        })
    }
}

struct Space {
    cols: ColumnIndex,
    ech: Echelon,
}

/// Closes the generators under all weight-admissible n-th products and compares the
/// result with the full weight spaces of `sector`, up to `weight_bound`.
///
/// The subalgebra generated by a set is spanned by iterated modes of the generators on
/// the vacuum, so each round applies generator modes to the elements found in the previous one.
pub fn weak_closure(
    spec: &Arc<FreeFieldSpec>,
    gens: &Catalog,
    sector: Sector,
    weight_bound: u32,
    product_depth: usize,
    cache: Option<&BasisCache>,
) -> Result<ClosureReport, RelationsError> {
    let bound2 = 2 * weight_bound;
    let elements = gens.instantiate(spec)?;
    let mut spaces: BTreeMap<u32, Space> = BTreeMap::new();
    let mut full = BTreeMap::new();
    for w2 in 0..=bound2 {
        let b = basis_with(cache, spec, w2, sector);
        full.insert(w2, b.len());
        spaces.insert(w2, Space { cols: ColumnIndex::from_monomials(b.monomials), ech: Echelon::new() });
    }

    let admit = |x: FieldElement, spaces: &mut BTreeMap<u32, Space>| -> Result<Option<FieldElement>, RelationsError> {
        if x.is_zero() {
            return Ok(None);
        }
        let w2 = x.weight2x().ok_or(RelationsError::InhomogeneousInput)?;
        let Some(s) = spaces.get_mut(&w2) else { return Ok(None) };
        let v = s.cols.vector(&x);
        Ok(s.ech.insert(v).then_some(x))
    };

    let mut frontier = Vec::new();
    for x in std::iter::once(FieldElement::vacuum(spec)).chain(elements.iter().cloned()) {
        if let Some(x) = admit(x, &mut spaces)? {
            frontier.push(x);
        }
    }
    let mut rounds = 0;
    let mut stable = frontier.is_empty();
    while rounds < product_depth && !frontier.is_empty() {
        rounds += 1;
        let jobs: Vec<(usize, i64, usize)> = frontier
            .iter()
            .enumerate()
            .flat_map(|(xi, x)| {
                let wx = x.weight2x().unwrap_or(0) as i64;
                elements.iter().enumerate().flat_map(move |(gi, g)| {
                    let wg = g.weight2x().unwrap_or(0) as i64;
                    // doubled result weight wg + wx − 2n − 2 must lie in [0, 2·bound]
                    let s = wg + wx - 2;
                    let top = s.div_euclid(2);
                    let lo = (s - bound2 as i64 + 1).div_euclid(2);
                    (lo..=top).map(move |n| (gi, n, xi))
                })
            })
            .collect();
        let products: Vec<FieldElement> = jobs
            .par_iter()
            .map(|&(gi, n, xi)| elements[gi].nth_product(n, &frontier[xi]).expect("same algebra"))
            .collect();
        let mut next = Vec::new();
        for p in products {
            if let Some(x) = admit(p, &mut spaces)? {
                next.push(x);
            }
        }
        stable = next.is_empty();
        frontier = next;
    }
    let weights = spaces
        .iter()
        .map(|(&w2, s)| WeightStatus { weight2x: w2, reached: s.ech.rank(), full: full[&w2] })
        .collect();
    Ok(ClosureReport { weights, rounds, stable })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freefield::wfree_sln;
    use crate::orbifold::{Recipe, UIndex};

    #[test]
    fn virasoro_alone() {
        let s = Arc::new(wfree_sln(4).unwrap());
        let g = Catalog::custom(vec![Recipe::W { flavor: 2 }]);
        let r = weak_closure(&s, &g, Sector::Invariant, 2, 4, None).unwrap();
        assert_eq!(r.weight(2).unwrap().reached, 1);
        assert!(r.weight(2).unwrap().saturated());
    }

    #[test]
    fn small_weak_generation() {
        let s = Arc::new(wfree_sln(4).unwrap());
        let with_u = Catalog::custom(vec![
            Recipe::W { flavor: 2 },
            Recipe::W { flavor: 4 },
            Recipe::U(UIndex::new(1, 1, 0, 0).unwrap()),
        ]);
        let r = weak_closure(&s, &with_u, Sector::Invariant, 8, 16, None).unwrap();
        assert!(r.saturated(), "{:?}", r.weights);
        let without = Catalog::custom(vec![Recipe::W { flavor: 2 }, Recipe::W { flavor: 4 }]);
        let r = weak_closure(&s, &without, Sector::Invariant, 6, 16, None).unwrap();
        let w6 = r.weight(6).unwrap();
        assert!(w6.reached < w6.full);
    }
}
