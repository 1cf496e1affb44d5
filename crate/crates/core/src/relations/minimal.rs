use std::collections::{BTreeMap, HashMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::basis::{basis_with, BasisCache, WeightBasis};
use crate::fock::{monomial_derivative, monomial_nth_product, Monomial};
use crate::freefield::FreeFieldSpec;
use crate::linalg::{Echelon, SparseVec};
use crate::orbifold::{type_string, Sector};

/// Number of minimal strong generators per weight (keys are doubled weights).
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TypeProfile {
    pub counts: BTreeMap<u32, u64>,
}

impl TypeProfile {
    pub fn from_weights(pairs: &[(u32, u64)]) -> Self {
        TypeProfile { counts: pairs.iter().filter(|p| p.1 > 0).map(|&(w, c)| (2 * w, c)).collect() }
    }

    pub fn count(&self, weight: u32) -> u64 {
        self.counts.get(&(2 * weight)).copied().unwrap_or(0)
    }

    /// Profile restricted to weights in [lo, hi].
    pub fn window(&self, lo: u32, hi: u32) -> TypeProfile {
        TypeProfile { counts: self.counts.range(2 * lo..=2 * hi).map(|(k, v)| (*k, *v)).filter(|p| p.1 > 0).collect() }
    }

    pub fn type_string(&self) -> String {
        if self.counts.keys().all(|k| k % 2 == 0) {
            let c: BTreeMap<u32, u64> = self.counts.iter().map(|(k, v)| (k / 2, *v)).collect();
            return type_string(&c);
        }
        let parts: Vec<String> = self
            .counts
            .iter()
            .map(|(k, v)| {
                let w = if k % 2 == 0 { (k / 2).to_string() } else { format!("{k}/2") };
                if *v == 1 {
                    w
                } else {
                    format!("{w}^{v}")
                }
            })
            .collect();
        format!("W({})", parts.join(","))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let counts: serde_json::Map<String, serde_json::Value> = self
            .counts
            .iter()
            .map(|(k, v)| {
                let w = if k % 2 == 0 { (k / 2).to_string() } else { format!("{k}/2") };
                (w, serde_json::Value::from(*v))
            })
            .collect();
        serde_json::json!({ "counts": counts, "type": self.type_string() })
    }
}

/// Connected components of the pairing graph; contractions preserve the parity of the
/// number of legs in each component, which splits every weight space into blocks.
pub(crate) fn pairing_components(spec: &FreeFieldSpec) -> Vec<usize> {
    let n = spec.len();
    let mut comp: Vec<usize> = (0..n).collect();
    fn find(c: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while c[r] != r {
            r = c[r];
        }
        c[x] = r;
        r
    }
    for g in 0..n {
        for h in 0..n {
            if !spec.pairing(g, h).is_zero() {
                let (a, b) = (find(&mut comp, g), find(&mut comp, h));
                comp[a.max(b)] = a.min(b);
            }
        }
    }
    (0..n).map(|g| find(&mut comp, g)).collect()
}

pub(crate) fn block_key(m: &Monomial, comp: &[usize]) -> u64 {
    m.legs().iter().fold(0u64, |k, l| k ^ (1u64 << comp[l.gen as usize]))
}

/// dim V_d − dim C_1(V)_d for one weight, where C_1 is spanned by ∂V_{d−1} and :V_p V_q:.
pub(crate) fn indecomposable_count(
    spec: &FreeFieldSpec,
    lower: &BTreeMap<u32, WeightBasis>,
    target: &WeightBasis,
    comp: &[usize],
) -> u64 {
    let d = target.weight2x;
    if target.is_empty() {
        return 0;
    }
    let cols: HashMap<&Monomial, usize> = target.monomials.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut block_dims: BTreeMap<u64, usize> = BTreeMap::new();
    for m in &target.monomials {
        *block_dims.entry(block_key(m, comp)).or_default() += 1;
    }

    let mut jobs: Vec<(Monomial, Option<Monomial>)> = Vec::new();
    if let Some(prev) = d.checked_sub(2).and_then(|w| lower.get(&w)) {
        jobs.extend(prev.monomials.iter().map(|m| (m.clone(), None)));
    }
    for (&p, bp) in lower.range(1..) {
        let q = d.saturating_sub(p);
        if q < p || p + q != d {
            continue;
        }
        let Some(bq) = lower.get(&q) else { continue };
        for (i, x) in bp.monomials.iter().enumerate() {
            let start = if p == q { i } else { 0 };
            for y in &bq.monomials[start..] {
                jobs.push((x.clone(), Some(y.clone())));
            }
        }
    }
    let rows: Vec<(u64, SparseVec)> = jobs
        .par_iter()
        .filter_map(|(x, y)| {
            let terms = match y {
                None => monomial_derivative(spec, x),
                Some(y) => monomial_nth_product(spec, x, -1, y),
            };
            let v: SparseVec = terms.into_iter().map(|(m, c)| (cols[&m], c)).collect();
            let key = block_key(v.keys().next().map(|&c| &target.monomials[c])?, comp);
            Some((key, v))
        })
        .collect();

    let mut by_block: BTreeMap<u64, Vec<SparseVec>> = BTreeMap::new();
    for (k, v) in rows {
        by_block.entry(k).or_default().push(v);
    }
    let ranks: Vec<(u64, usize)> = by_block
        .into_par_iter()
        .map(|(k, mut rows)| {
            let mut seen = HashSet::new();
            rows.retain(|r| seen.insert(r.iter().map(|(c, v)| (*c, v.clone())).collect::<Vec<_>>()));
            rows.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.iter().cmp(b.iter())));
            let cap = block_dims[&k];
            let mut e = Echelon::new();
            for r in rows {
                if e.rank() == cap {
                    break;
                }
                e.insert(r);
            }
            (k, e.rank())
        })
        .collect();
    let spanned: usize = ranks.iter().map(|r| r.1).sum();
    (target.len() - spanned) as u64
}

/// Free-limit minimal strong generator counts for weights up to `weight_bound`.
pub fn minimal_generators(spec: &FreeFieldSpec, sector: Sector, weight_bound: u32) -> TypeProfile {
    minimal_generators_cached(spec, sector, weight_bound, None)
}

pub fn minimal_generators_cached(
    spec: &FreeFieldSpec,
    sector: Sector,
    weight_bound: u32,
    cache: Option<&BasisCache>,
) -> TypeProfile {
    let comp = pairing_components(spec);
    let mut lower: BTreeMap<u32, WeightBasis> = BTreeMap::new();
    let mut counts = BTreeMap::new();
    for d in 1..=2 * weight_bound {
        let b = basis_with(cache, spec, d, sector);
        let c = indecomposable_count(spec, &lower, &b, &comp);
        if c > 0 {
            counts.insert(d, c);
        }
        lower.insert(d, b);
    }
    TypeProfile { counts }
}
