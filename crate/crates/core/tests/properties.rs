mod common;

use std::sync::Arc;

use proptest::prelude::*;
use vaw_core::fock::{FieldElement, Leg};
use vaw_core::freefield::{make_standard_algebra, wfree_sln, Family, FreeFieldSpec};
use vaw_core::orbifold::{generator_catalog, theta, u_field, CatalogKind, Sector};
use vaw_core::relations::{decouple, weight_basis};
use vaw_core::scalars::{ExtScalar, Param, ParamRational, Poly, Rational};
use vaw_core::series::character;

fn rat() -> impl Strategy<Value = Rational> {
    (-20i64..=20, 1i64..=12).prop_map(|(p, q)| Rational::frac(p, q))
}

fn element(spec: &Arc<FreeFieldSpec>, terms: &[(Vec<(usize, u16)>, Rational)]) -> FieldElement {
    let mut x = FieldElement::zero(spec);
    for (legs, c) in terms {
        let legs: Vec<Leg> = legs.iter().map(|&(g, k)| Leg::new(g % spec.len(), k)).collect();
        x = x.add(&FieldElement::from_legs(spec, &legs, c.clone()));
    }
    x
}

fn terms() -> impl Strategy<Value = Vec<(Vec<(usize, u16)>, Rational)>> {
    prop::collection::vec((prop::collection::vec((0usize..4, 0u16..3), 0..=3), rat()), 0..=4)
}

fn sl4() -> Arc<FreeFieldSpec> {
    Arc::new(wfree_sln(4).unwrap())
}

fn psi_poly() -> impl Strategy<Value = Poly> {
    prop::collection::vec(-4i64..=4, 1..=3).prop_map(|cs| {
        cs.iter().enumerate().fold(Poly::zero(), |acc, (k, c)| {
            &acc + &Poly::var(Param::Psi).pow(k as u32).scale(&(*c).into())
        })
    })
}

fn param_rational() -> impl Strategy<Value = ParamRational> {
    (psi_poly(), psi_poly()).prop_filter_map("nonzero denominator", |(n, d)| ParamRational::new(n, d).ok())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn rational_field_laws(a in rat(), b in rat(), c in rat()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.recip().unwrap(), Rational::one());
        }
        let s = a.to_string();
        prop_assert_eq!(s.parse::<Rational>().unwrap(), a);
    }

    #[test]
    fn rational_function_laws(a in param_rational(), b in param_rational(), c in param_rational()) {
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert_eq!(&(&a - &b) + &b, a.clone());
        if !b.is_zero() {
            prop_assert_eq!(&a.checked_div(&b).unwrap() * &b, a.clone());
        }
    }

    #[test]
    fn evaluation_is_a_homomorphism(a in param_rational(), b in param_rational(), x in 3i64..40) {
        let at = [(Param::Psi, Rational::frac(x, 7))];
        if let (Ok(u), Ok(v), Ok(w)) = (a.evaluate_at(&at), b.evaluate_at(&at), (&a * &b).evaluate_at(&at)) {
            prop_assert_eq!(&u * &v, w);
        }
    }

    #[test]
    fn ext_scalars_square_correctly(i in 1u32..4, r in rat()) {
        let n = ExtScalar::symbol(i);
        let sq = n.mul(&n).to_rational().unwrap();
        prop_assert_eq!(sq, Rational::factorial(4 * i as u64 + 1));
        let x = ExtScalar::from_rational(r.clone()).mul(&ExtScalar::symbol_inverse(i)).mul(&n);
        prop_assert_eq!(x.to_rational(), Some(r));
    }

    #[test]
    fn theta_is_an_involutive_automorphism(a in terms(), b in terms(), n in -2i64..6) {
        let s = sl4();
        let (x, y) = (element(&s, &a), element(&s, &b));
        prop_assert_eq!(theta(&theta(&x)), x.clone());
        prop_assert_eq!(theta(&x.nth_product(n, &y).unwrap()), theta(&x).nth_product(n, &theta(&y)).unwrap());
        prop_assert_eq!(theta(&x.derivative()), theta(&x).derivative());
    }

    #[test]
    fn element_json_round_trips(a in terms(), which in 0usize..2) {
        let s = if which == 0 { sl4() } else { Arc::new(make_standard_algebra(Family::SOdd, 2, 2).unwrap()) };
        let x = element(&s, &a);
        let text = x.to_json().to_string();
        let back = FieldElement::from_json(&s, &serde_json::from_str(&text).unwrap()).unwrap();
        prop_assert_eq!(&back, &x);
        prop_assert_eq!(back.to_json().to_string(), text);
    }

    #[test]
    fn spec_json_round_trips(n in 3u32..8) {
        let s = wfree_sln(n).unwrap();
        let back = FreeFieldSpec::from_json(&s.to_json()).unwrap();
        prop_assert_eq!(back.hash(), s.hash());
        prop_assert_eq!(back, s);
    }
}

#[test]
fn rescaling_preserves_feasibility() {
    let s = sl4();
    let factors: Vec<Rational> = vec![Rational::frac(2, 3), Rational::from(5), Rational::frac(-1, 4)];
    let r = Arc::new(s.rescaled(&factors));
    let gens = generator_catalog(Some(4), CatalogKind::StrongFree, None).unwrap();
    for (a, b) in [(0, 0), (0, 2), (0, 8), (0, 6), (1, 1)] {
        let t1 = decouple(&u_field(&s, 1, 1, a, b).unwrap(), &gens, 3).unwrap();
        let t2 = decouple(&u_field(&r, 1, 1, a, b).unwrap(), &gens, 3).unwrap();
        assert_eq!(t1.status, t2.status, "U(1,1,{a},{b})");
        assert!(t2.residual.is_zero() || !t2.is_solved());
    }
}

#[test]
fn infeasible_certificates_raise_rank_by_one() {
    let s = Arc::new(wfree_sln(5).unwrap());
    let gens = generator_catalog(Some(5), CatalogKind::StrongFree, None).unwrap();
    for (i, j, b) in [(1, 1, 0), (1, 2, 0), (2, 2, 0), (1, 2, 3)] {
        let r = decouple(&u_field(&s, i, j, 0, b).unwrap(), &gens, 4).unwrap();
        if let Some(c) = r.certificate {
            assert_eq!(c.augmented_rank, c.span_rank + 1);
        } else {
            assert!(r.residual.is_zero());
        }
    }
}

#[test]
fn basis_sizes_match_characters_through_eighteen() {
    let s = wfree_sln(5).unwrap();
    for sec in [Sector::Invariant, Sector::AntiInvariant, Sector::Full] {
        let ch = character(&s, sec, 18);
        for d in 0..=18 {
            assert_eq!(ch.coeff(d), weight_basis(&s, 2 * d, sec).len() as i128, "{} {d}", sec.name());
        }
    }
    let f = make_standard_algebra(Family::OOdd, 3, 1).unwrap();
    let ch = character(&f, Sector::Full, 6);
    for d2 in 0..=12u32 {
        assert_eq!(ch.coeff2x(d2), weight_basis(&f, d2, Sector::Full).len() as i128);
    }
}
