mod common;

use std::sync::Arc;

use proptest::prelude::*;
use vaw_core::fock::{FieldElement, Leg};
use vaw_core::freefield::{heisenberg, make_standard_algebra, wfree_sln, Family, FreeFieldSpec};
use vaw_core::orbifold::u_field;
use vaw_core::scalars::Rational;

use common::{q, Oracle};

fn algebras() -> Vec<Arc<FreeFieldSpec>> {
    vec![
        Arc::new(wfree_sln(4).unwrap()),
        Arc::new(heisenberg(&[3, 5])),
        Arc::new(make_standard_algebra(Family::OOdd, 2, 1).unwrap()),
        Arc::new(make_standard_algebra(Family::SEv, 1, 1).unwrap()),
        Arc::new(make_standard_algebra(Family::SOdd, 1, 2).unwrap()),
        Arc::new(make_standard_algebra(Family::OEv, 2, 2).unwrap()),
    ]
}

fn element(spec: &Arc<FreeFieldSpec>, terms: &Terms) -> FieldElement {
    let mut x = FieldElement::zero(spec);
    for (legs, p, d) in terms {
        let legs: Vec<Leg> = legs.iter().map(|&(g, k)| Leg::new(g % spec.len(), k)).collect();
        x = x.add(&FieldElement::from_legs(spec, &legs, Rational::frac(*p, *d)));
    }
    x
}

type Terms = Vec<(Vec<(usize, u16)>, i64, i64)>;

fn terms() -> impl Strategy<Value = Terms> {
    prop::collection::vec((prop::collection::vec((0usize..6, 0u16..3), 0..=3), -3i64..=3, 1i64..=3), 1..=3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn products_match_mode_algebra(which in 0usize..6, a in terms(), b in terms(), n in -3i64..=5) {
        let spec = &algebras()[which];
        let (x, y) = (element(spec, &a), element(spec, &b));
        let o = Oracle::new(spec);
        prop_assert_eq!(x.nth_product(n, &y).unwrap(), o.nth_product(&x, n, &y));
    }

    #[test]
    fn derivative_matches_translation(which in 0usize..6, a in terms()) {
        let spec = &algebras()[which];
        let x = element(spec, &a);
        prop_assert_eq!(x.derivative(), Oracle::new(spec).derivative_of(&x));
    }
}

#[test]
fn oracle_sanity() {
    let s = Arc::new(wfree_sln(4).unwrap());
    let o = Oracle::new(&s);
    let w3: FieldElement = FieldElement::generator(&s, 1);
    assert_eq!(o.nth_product(&w3, 5, &w3), FieldElement::vacuum(&s));
    assert_eq!(o.u(1, 1, 0, 1), o.derivative_of(&o.u(1, 1, 0, 0)).scale_rational(&q(1, 2)));
    // the quadratic fields built from modes agree with the engine
    for (a, b) in [(0, 0), (1, 2), (3, 0)] {
        assert_eq!(o.u(1, 1, a, b), u_field(&s, 1, 1, a, b).unwrap());
    }
}

#[test]
fn normal_ordering_is_not_associative() {
    let s = Arc::new(heisenberg(&[3]));
    let o = Oracle::new(&s);
    let a: FieldElement = FieldElement::generator(&s, 0);
    let left = o.normal_order(&o.normal_order(&a, &a), &a);
    let right = o.normal_order(&a, &o.normal_order(&a, &a));
    assert_ne!(left, right);
    assert_eq!(left.sub(&right), a.derivative_k(2));
}
