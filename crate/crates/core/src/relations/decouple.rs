use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use rayon::prelude::*;
use serde_json::json;

use super::minimal::{block_key, pairing_components};
use super::RelationsError;
use crate::fock::FieldElement;
use crate::freefield::FreeFieldSpec;
use crate::linalg::{ColumnIndex, Echelon};
use crate::orbifold::Catalog;
use crate::scalars::Rational;

pub const DEFAULT_MAX_WORD_DEGREE: usize = 4;

/// ∂^der applied to catalog entry `gen`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Factor {
    pub gen: usize,
    pub der: u32,
}

/// Right-nested normally ordered word :f₁(:f₂(⋯ f_r):): with f₁ ≤ f₂ ≤ ⋯; empty is the vacuum.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<Factor>);

impl Word {
    pub fn degree(&self) -> usize {
        self.0.len()
    }

    /// Element-grammar rendering, e.g. `NO(D^2 U(1,1,0,0), W4)`.
    pub fn render(&self, gens: &Catalog) -> String {
        fn factor(f: &Factor, gens: &Catalog) -> String {
            let label = &gens.entries[f.gen].label;
            match f.der {
                0 => label.clone(),
                1 => format!("D {label}"),
                k => format!("D^{k} {label}"),
            }
        }
        match self.0.len() {
            0 => "1".to_string(),
            _ => {
                let mut s = factor(self.0.last().unwrap(), gens);
                for f in self.0.iter().rev().skip(1) {
                    s = format!("NO({}, {})", factor(f, gens), s);
                }
                s
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Solved,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub span_rank: usize,
    pub augmented_rank: usize,
    pub word_count: usize,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct RelationReport {
    pub target: FieldElement,
    pub generators: Catalog,
    pub status: Status,
    pub combination: Vec<(Word, Rational)>,
    pub residual: FieldElement,
    pub certificate: Option<Certificate>,
}

impl RelationReport {
    pub fn is_solved(&self) -> bool {
        self.status == Status::Solved
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "schema": "1",
            "target": self.target.to_json(),
            "generators": self.generators.entries.iter().map(|e| e.label.clone()).collect::<Vec<_>>(),
            "status": match self.status { Status::Solved => "solved", Status::Infeasible => "infeasible" },
            "combination": self.combination.iter().map(|(w, c)| json!({"word": w.render(&self.generators), "coeff": c.to_string()})).collect::<Vec<_>>(),
            "residual": self.residual.to_json(),
            "certificate": self.certificate.as_ref().map(|c| json!({
                "span_rank": c.span_rank,
                "augmented_rank": c.augmented_rank,
                "word_count": c.word_count,
                "reason": c.reason,
            })),
        })
    }
}

/// Values of words, computed bottom-up through shared suffixes.
pub(crate) struct WordEvaluator<'a> {
    spec: &'a Arc<FreeFieldSpec>,
    gens: &'a [FieldElement],
    cache: HashMap<Vec<Factor>, FieldElement>,
}

impl<'a> WordEvaluator<'a> {
    pub(crate) fn new(spec: &'a Arc<FreeFieldSpec>, gens: &'a [FieldElement]) -> Self {
        WordEvaluator { spec, gens, cache: HashMap::new() }
    }

    fn factor(&self, f: &Factor) -> FieldElement {
        self.gens[f.gen].derivative_k(f.der)
    }

    /// Evaluate many words, filling the suffix cache level by level in parallel.
    pub(crate) fn evaluate_all(&mut self, words: &[Word]) -> Vec<FieldElement> {
        let max_deg = words.iter().map(|w| w.degree()).max().unwrap_or(0);
        let mut needed: Vec<BTreeSet<Vec<Factor>>> = vec![BTreeSet::new(); max_deg + 1];
        for w in words {
            for k in 0..w.degree() {
                needed[w.degree() - k].insert(w.0[k..].to_vec());
            }
        }
        for (deg, level) in needed.iter().enumerate().skip(1) {
            let todo: Vec<&Vec<Factor>> = level.iter().filter(|s| !self.cache.contains_key(*s)).collect();
            let cache = &self.cache;
            let vals: Vec<(Vec<Factor>, FieldElement)> = todo
                .par_iter()
                .map(|s| {
                    let head = self.factor(&s[0]);
                    let v = if deg == 1 {
                        head
                    } else {
                        head.normal_order(&cache[&s[1..]]).expect("same algebra")
                    };
                    ((*s).clone(), v)
                })
                .collect();
            self.cache.extend(vals);
        }
        words
            .iter()
            .map(|w| if w.0.is_empty() { FieldElement::vacuum(self.spec) } else { self.cache[&w.0].clone() })
            .collect()
    }
}

/// Multisets of factors of total doubled weight `w2` and size ≤ `max_deg`, sorted.
pub(crate) fn enumerate_words(factors: &[(Factor, u32)], w2: u32, max_deg: usize) -> Vec<Word> {
    fn rec(factors: &[(Factor, u32)], start: usize, left: u32, deg: usize, cur: &mut Vec<Factor>, out: &mut Vec<Word>) {
        if left == 0 {
            if !cur.is_empty() {
                out.push(Word(cur.clone()));
            }
            return;
        }
        if deg == 0 {
            return;
        }
        for k in start..factors.len() {
            let (f, w) = factors[k];
            if w > left {
                continue;
            }
            cur.push(f);
            rec(factors, k, left - w, deg - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(factors, 0, w2, max_deg, &mut Vec::new(), &mut out);
    out.sort_by(|a, b| a.degree().cmp(&b.degree()).then_with(|| a.cmp(b)));
    out
}

fn element_block(x: &FieldElement, comp: &[usize]) -> Option<u64> {
    let mut keys = x.terms().map(|(m, _)| block_key(m, comp));
    let first = keys.next()?;
    keys.all(|k| k == first).then_some(first)
}

/// Express `target` through normally ordered words in catalog entries of lower weight.
pub fn decouple(target: &FieldElement, gens: &Catalog, max_word_degree: usize) -> Result<RelationReport, RelationsError> {
    let spec = target.spec().clone();
    let w2 = target.weight2x().ok_or(RelationsError::InhomogeneousInput)?;
    let mut report = RelationReport {
        target: target.clone(),
        generators: gens.clone(),
        status: Status::Solved,
        combination: Vec::new(),
        residual: FieldElement::zero(&spec),
        certificate: None,
    };
    if target.is_zero() {
        return Ok(report);
    }
    if w2 == 0 {
        report.combination.push((Word(vec![]), target.coefficient(&crate::fock::Monomial::vacuum())));
        return Ok(report);
    }
    let elements = gens.instantiate(&spec)?;
    let lower: Vec<usize> = (0..elements.len()).filter(|&k| gens.entries[k].weight * 2 < w2).collect();

    let invariant_gens = elements.iter().all(|g| crate::orbifold::theta(g) == *g);
    let anti_part = target.sub(&crate::orbifold::theta(target));
    if invariant_gens && !anti_part.is_zero() {
        report.status = Status::Infeasible;
        report.residual = target.clone();
        report.certificate = Some(Certificate {
            span_rank: 0,
            augmented_rank: 1,
            word_count: 0,
            reason: "sector mismatch: target has an anti-invariant component".into(),
        });
        return Ok(report);
    }

    let comp = pairing_components(&spec);
    let mut factors: Vec<(Factor, u32)> = Vec::new();
    for &k in &lower {
        let wg = 2 * gens.entries[k].weight;
        let mut der = 0;
        while wg + 2 * der <= w2 {
            factors.push((Factor { gen: k, der }, wg + 2 * der));
            der += 1;
        }
    }
    let gen_block: Vec<Option<u64>> = elements.iter().map(|g| element_block(g, &comp)).collect();
    let target_blocks: BTreeSet<u64> = target.terms().map(|(m, _)| block_key(m, &comp)).collect();
    let mut words = enumerate_words(&factors, w2, max_word_degree);
    words.retain(|w| {
        let mut key = 0u64;
        for f in &w.0 {
            match gen_block[f.gen] {
                Some(b) => key ^= b,
                None => return true,
            }
        }
        target_blocks.contains(&key)
    });

    let mut eval = WordEvaluator::new(&spec, &elements);
    let values = eval.evaluate_all(&words);

    let mut idx = ColumnIndex::new();
    let tvec = idx.vector(target);
    let vecs: Vec<_> = values.iter().map(|v| idx.vector(v)).collect();
    let mut ech = Echelon::new();
    let mut independent = Vec::new();
    for (k, v) in vecs.iter().enumerate() {
        if ech.insert(v.clone()) {
            independent.push(k);
        }
    }
    let span_rank = ech.rank();
    if !ech.contains(&tvec) {
        let mut aug = ech.clone();
        aug.insert(tvec);
        report.status = Status::Infeasible;
        report.residual = target.clone();
        report.certificate = Some(Certificate {
            span_rank,
            augmented_rank: aug.rank(),
            word_count: words.len(),
            reason: "target lies outside the span of normally ordered words".into(),
        });
        return Ok(report);
    }

    let mut tracked = Echelon::with_tracking();
    for &k in &independent {
        tracked.insert_labeled(vecs[k].clone(), k);
    }
    let (_, combo) = tracked.reduce_tracked(tvec);
    let mut expansion = FieldElement::zero(&spec);
    for (k, c) in combo {
        expansion = expansion.add(&values[k].scale_rational(&c));
        report.combination.push((words[k].clone(), c));
    }
    report.residual = target.sub(&expansion);
    if !report.residual.is_zero() {
        return Err(RelationsError::Internal("solved relation does not re-expand to its target".into()));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freefield::wfree_sln;
    use crate::orbifold::{generator_catalog, u_field, CatalogKind, Recipe, UIndex};

    fn sl(n: u32) -> Arc<FreeFieldSpec> {
        Arc::new(wfree_sln(n).unwrap())
    }

    fn check_solved(r: &RelationReport) {
        assert!(r.is_solved(), "{:?}", r.certificate);
        assert!(r.residual.is_zero());
        let spec = r.target.spec().clone();
        let elements = r.generators.instantiate(&spec).unwrap();
        let words: Vec<Word> = r.combination.iter().map(|c| c.0.clone()).collect();
        let values = WordEvaluator::new(&spec, &elements).evaluate_all(&words);
        let mut sum = FieldElement::zero(&spec);
        for (v, (_, c)) in values.iter().zip(&r.combination) {
            sum = sum.add(&v.scale_rational(c));
        }
        assert_eq!(sum, r.target);
    }

    #[test]
    fn derivative_target() {
        let s = sl(4);
        let g = Catalog::custom(vec![Recipe::U(UIndex::new(1, 1, 0, 0).unwrap())]);
        let t = u_field(&s, 1, 1, 0, 0).unwrap().derivative_k(2);
        let r = decouple(&t, &g, 4).unwrap();
        check_solved(&r);
        assert_eq!(r.combination.len(), 1);
        assert_eq!(r.combination[0].0.render(&g), "D^2 U(1,1,0,0)");
        assert_eq!(r.combination[0].1, Rational::one());
    }

    #[test]
    fn weight_fourteen_target_decouples() {
        let s = sl(4);
        let g = generator_catalog(Some(4), CatalogKind::StrongFree, None).unwrap();
        let r = decouple(&u_field(&s, 1, 1, 0, 8).unwrap(), &g, 2).unwrap();
        check_solved(&r);
    }

    #[test]
    fn lowest_quadratic_is_infeasible() {
        let s = sl(4);
        let g = generator_catalog(Some(4), CatalogKind::StrongFree, None).unwrap();
        let r = decouple(&u_field(&s, 1, 1, 0, 0).unwrap(), &g, 4).unwrap();
        assert_eq!(r.status, Status::Infeasible);
        let c = r.certificate.unwrap();
        assert_eq!(c.augmented_rank, c.span_rank + 1);
    }

    #[test]
    fn degenerate_inputs() {
        let s = sl(4);
        let g = generator_catalog(Some(4), CatalogKind::StrongFree, None).unwrap();
        let r = decouple(&FieldElement::vacuum(&s).scale_rational(&Rational::frac(3, 2)), &g, 4).unwrap();
        assert!(r.is_solved());
        assert_eq!(r.combination[0].0.render(&g), "1");
        let w3: FieldElement = FieldElement::generator(&s, 1);
        let r = decouple(&w3, &g, 4).unwrap();
        assert_eq!(r.status, Status::Infeasible);
        assert!(r.certificate.unwrap().reason.contains("sector"));
        let mixed = w3.add(&FieldElement::generator(&s, 2));
        assert!(matches!(decouple(&mixed, &g, 4), Err(RelationsError::InhomogeneousInput)));
    }

    #[test]
    fn word_rendering() {
        let g = Catalog::custom(vec![Recipe::W { flavor: 2 }, Recipe::W { flavor: 4 }]);
        let w = Word(vec![Factor { gen: 0, der: 1 }, Factor { gen: 0, der: 1 }, Factor { gen: 1, der: 0 }]);
        assert_eq!(w.render(&g), "NO(D L, NO(D L, W4))");
    }
}
