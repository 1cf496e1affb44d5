use std::cmp::Ordering;

use smallvec::SmallVec;

use crate::freefield::FreeFieldSpec;

/// One factor ∂^der X^gen of a normally ordered monomial.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Leg {
    pub gen: u16,
    pub der: u16,
}

impl Leg {
    pub fn new(gen: usize, der: u16) -> Self {
        Leg { gen: gen as u16, der }
    }
}

/// Canonical leg order: flavor ascending, then derivative order descending.
impl Ord for Leg {
    fn cmp(&self, o: &Self) -> Ordering {
        self.gen.cmp(&o.gen).then(o.der.cmp(&self.der))
    }
}

impl PartialOrd for Leg {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

pub type Legs = SmallVec<[Leg; 6]>;

/// Canonically ordered product of legs, Π ∂^d X applied to the vacuum.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial(Legs);

/// Fewer legs first, then lexicographic in the leg order.
impl Ord for Monomial {
    fn cmp(&self, o: &Self) -> Ordering {
        self.0.len().cmp(&o.0.len()).then_with(|| self.0.as_slice().cmp(o.0.as_slice()))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Monomial {
    pub fn vacuum() -> Self {
        Monomial(Legs::new())
    }

    /// Sort legs into canonical order. Returns the monomial and whether the
    /// Koszul sign is negative, or `None` if a repeated odd leg kills it.
    pub fn canonical(spec: &FreeFieldSpec, legs: impl IntoIterator<Item = Leg>) -> Option<(Monomial, bool)> {
        let mut v: Legs = legs.into_iter().collect();
        let mut negative = false;
        for i in 1..v.len() {
            let mut j = i;
            while j > 0 && v[j - 1] > v[j] {
                if spec.is_odd(v[j - 1].gen as usize) && spec.is_odd(v[j].gen as usize) {
                    negative = !negative;
                }
                v.swap(j - 1, j);
                j -= 1;
            }
        }
        for w in v.windows(2) {
            if w[0] == w[1] && spec.is_odd(w[0].gen as usize) {
                return None;
            }
        }
        Some((Monomial(v), negative))
    }

    /// Wrap legs already known to be canonical.
    pub(crate) fn from_sorted(legs: Legs) -> Self {
        debug_assert!(legs.windows(2).all(|w| w[0] <= w[1]));
        Monomial(legs)
    }

    pub fn legs(&self) -> &[Leg] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_vacuum(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weight2x(&self, spec: &FreeFieldSpec) -> u32 {
        self.0.iter().map(|l| spec.weight2x(l.gen as usize) + 2 * l.der as u32).sum()
    }

    pub fn is_odd(&self, spec: &FreeFieldSpec) -> bool {
        self.0.iter().filter(|l| spec.is_odd(l.gen as usize)).count() % 2 == 1
    }

    pub fn z2sign(&self, spec: &FreeFieldSpec) -> i8 {
        self.0.iter().map(|l| spec.generator(l.gen as usize).z2sign).product()
    }

    /// Bit g set iff flavor g occurs an odd number of times.
    pub fn flavor_parity(&self) -> u64 {
        self.0.iter().fold(0u64, |m, l| m ^ (1u64 << l.gen))
    }

    pub fn total_derivatives(&self) -> u32 {
        self.0.iter().map(|l| l.der as u32).sum()
    }
}
