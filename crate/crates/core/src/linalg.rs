//! Exact sparse Gaussian elimination over Q.

use std::collections::{BTreeMap, HashMap};

use crate::fock::{FieldElement, Monomial};
use crate::scalars::Rational;

pub type SparseVec = BTreeMap<usize, Rational>;

/// Assigns column indices to monomials in first-seen order.
#[derive(Default, Clone, Debug)]
pub struct ColumnIndex {
    map: HashMap<Monomial, usize>,
    cols: Vec<Monomial>,
}

impl ColumnIndex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_monomials(ms: impl IntoIterator<Item = Monomial>) -> Self {
        let mut c = Self::new();
        for m in ms {
            c.index(&m);
        }
        c
    }

    pub fn index(&mut self, m: &Monomial) -> usize {
        if let Some(&i) = self.map.get(m) {
            return i;
        }
        let i = self.cols.len();
        self.map.insert(m.clone(), i);
        self.cols.push(m.clone());
        i
    }

    pub fn get(&self, m: &Monomial) -> Option<usize> {
        self.map.get(m).copied()
    }

    pub fn monomial(&self, i: usize) -> &Monomial {
        &self.cols[i]
    }

    pub fn len(&self) -> usize {
        self.cols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cols.is_empty()
    }

    pub fn vector(&mut self, x: &FieldElement) -> SparseVec {
        x.terms().map(|(m, c)| (self.index(m), c.clone())).collect()
    }
}

fn axpy(dst: &mut SparseVec, k: &Rational, src: &SparseVec) {
    for (c, v) in src {
        let slot = dst.entry(*c).or_default();
        *slot -= k * v;
        if slot.is_zero() {
            dst.remove(c);
        }
    }
}

/// Row echelon form built incrementally. Each stored row has pivot coefficient 1 at
/// its smallest column. With tracking, every row also records its expression in the
/// inserted vectors (by label).
#[derive(Default, Clone, Debug)]
pub struct Echelon {
    rows: Vec<SparseVec>,
    combos: Vec<SparseVec>,
    pivot_row: BTreeMap<usize, usize>,
    tracking: bool,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_tracking() -> Self {
        Echelon { tracking: true, ..Self::default() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivot_row.keys().copied()
    }

    fn reduce_inner(&self, mut v: SparseVec, mut combo: Option<&mut SparseVec>) -> SparseVec {
        let mut cursor = 0usize;
        loop {
            let hit = v.range(cursor..).find(|(c, _)| self.pivot_row.contains_key(c)).map(|(c, x)| (*c, x.clone()));
            let Some((col, k)) = hit else { break };
            let r = self.pivot_row[&col];
            axpy(&mut v, &k, &self.rows[r]);
            if let Some(cb) = combo.as_deref_mut() {
                axpy(cb, &k, &self.combos[r]);
            }
            cursor = col + 1;
        }
        v
    }

    /// Residual of `v` modulo the row space.
    pub fn reduce(&self, v: SparseVec) -> SparseVec {
        self.reduce_inner(v, None)
    }

    /// Residual together with the combination c such that v − Σ c_label·(inserted label) = residual.
    pub fn reduce_tracked(&self, v: SparseVec) -> (SparseVec, SparseVec) {
        let mut combo = SparseVec::new();
        let r = self.reduce_inner(v, Some(&mut combo));
        for x in combo.values_mut() {
            *x = -x.clone();
        }
        (r, combo)
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v.clone()).is_empty()
    }

    /// Adds `v`; returns true when it raised the rank.
    pub fn insert(&mut self, v: SparseVec) -> bool {
        self.insert_labeled(v, usize::MAX)
    }

    pub fn insert_labeled(&mut self, v: SparseVec, label: usize) -> bool {
        let mut combo = SparseVec::new();
        if self.tracking {
            combo.insert(label, Rational::one());
        }
        let tracking = self.tracking;
        let mut res = self.reduce_inner(v, tracking.then_some(&mut combo));
        let Some((&col, piv)) = res.iter().next() else { return false };
        if !piv.is_one() {
            let inv = piv.recip().expect("nonzero pivot");
            for x in res.values_mut() {
                *x *= &inv;
            }
            for x in combo.values_mut() {
                *x *= &inv;
            }
        }
        self.pivot_row.insert(col, self.rows.len());
        self.rows.push(res);
        self.combos.push(combo);
        true
    }
}

/// Rank of a list of elements over their monomial coordinates.
pub fn rank(elements: &[FieldElement]) -> usize {
    let mut idx = ColumnIndex::new();
    let mut e = Echelon::new();
    for x in elements {
        e.insert(idx.vector(x));
    }
    e.rank()
}

/// Coefficients expressing each target in `basis`, if possible.
pub fn express(targets: &[FieldElement], basis: &[FieldElement]) -> Option<Vec<Vec<Rational>>> {
    let mut idx = ColumnIndex::new();
    let mut e = Echelon::with_tracking();
    for (k, b) in basis.iter().enumerate() {
        e.insert_labeled(idx.vector(b), k);
    }
    let mut out = Vec::new();
    for t in targets {
        let (res, combo) = e.reduce_tracked(idx.vector(t));
        if !res.is_empty() {
            return None;
        }
        out.push((0..basis.len()).map(|k| combo.get(&k).cloned().unwrap_or_default()).collect());
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[(usize, i64)]) -> SparseVec {
        xs.iter().map(|(c, x)| (*c, Rational::from(*x))).collect()
    }

    #[test]
    fn rank_and_membership() {
        let mut e = Echelon::new();
        assert!(e.insert(v(&[(0, 1), (1, 2)])));
        assert!(e.insert(v(&[(1, 1), (2, 1)])));
        assert!(!e.insert(v(&[(0, 2), (1, 6), (2, 2)])));
        assert_eq!(e.rank(), 2);
        assert!(!e.contains(&v(&[(2, 1)])));
    }

    #[test]
    fn tracked_combination() {
        let mut e = Echelon::with_tracking();
        e.insert_labeled(v(&[(0, 1), (1, 1)]), 0);
        e.insert_labeled(v(&[(0, 1), (1, -1)]), 1);
        let (res, combo) = e.reduce_tracked(v(&[(0, 3), (1, 1)]));
        assert!(res.is_empty());
        assert_eq!(combo[&0], Rational::from(2));
        assert_eq!(combo[&1], Rational::from(1));
    }
}
