use std::sync::Arc;

use crate::curves::{ab_constants, central_charge, locus_eval, Locus};
use crate::freefield::wfree_sln;
use crate::orbifold::{generator_catalog, u_field, Catalog, CatalogKind, Recipe, Sector, UIndex};
use crate::relations::{
    decouple, minimal_generators, verify_identity, weak_closure, weight_basis, IdentityParams,
};
use crate::scalars::Rational;
use crate::series::character;

pub(crate) struct Row {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

fn identity_row(name: &str, kv: &[(&str, u32)], expect_hold: bool) -> Row {
    let mut p = IdentityParams::default();
    let mut label = name.to_string();
    for (k, v) in kv {
        p.set(k, *v).expect("known key");
        label.push_str(&format!(" {k}={v}"));
    }
    match verify_identity(name, &p) {
        Ok(r) => {
            let found: Vec<String> =
                r.checks.iter().map(|c| c.actual.as_ref().map_or("-".into(), |x| x.to_string())).collect();
            Row {
                name: label,
                pass: r.holds == expect_hold,
                detail: format!("holds={} coefficients [{}]", r.holds, found.join(", ")),
            }
        }
        Err(e) => Row { name: label, pass: false, detail: e.to_string() },
    }
}

pub(crate) fn run_suite() -> Vec<Row> {
    let mut rows = vec![identity_row("wt14", &[], true), identity_row("wt16", &[], true)];
    for i in [2, 3] {
        rows.push(identity_row("odd7", &[("i", i)], true));
        // the stored constant for odd8 is +1/2880 but the product gives -1/2880
        rows.push(identity_row("odd8", &[("i", i)], false));
        rows.push(identity_row("square_5", &[("i", i)], true));
    }
    for a in 0..=4 {
        rows.push(identity_row("raise33_3", &[("a", a)], true));
        rows.push(identity_row("raise33_1", &[("m", a)], true));
    }
    for a in 0..=3 {
        for i in [2, 3] {
            rows.push(identity_row("raise_cross_4", &[("i", i), ("a", a)], true));
        }
        rows.push(identity_row("cross_5", &[("i", 2), ("j", 3), ("a", a)], true));
    }
    rows.push(identity_row("cross_square", &[("i", 1), ("j", 2)], true));
    for r in 0..=1 {
        rows.push(identity_row("lastone", &[("i", 2), ("j", 3), ("r", r)], true));
    }
    for i in 1..=3 {
        for a in 0..=2 {
            rows.push(identity_row("nu_raising", &[("i", i), ("a", a)], true));
        }
    }

    for (n, b, ty) in [(4, 12, "W(2,4,6,8,10,12)"), (5, 14, "W(2,4,6,8^2,9,10^3,11,12^3,13,14^2)")] {
        let p = minimal_generators(&wfree_sln(n).unwrap(), Sector::Invariant, b);
        rows.push(Row { name: format!("minimal sl{n}"), pass: p.type_string() == ty, detail: p.type_string() });
    }

    let s7 = Arc::new(wfree_sln(7).unwrap());
    let gens = generator_catalog(Some(7), CatalogKind::StrongFree, Some(16)).unwrap();
    for (i, j, b, solved) in [(1, 1, 10, true), (1, 2, 8, true), (2, 2, 6, true), (1, 3, 6, false), (2, 3, 4, false), (3, 3, 2, false)] {
        let t = u_field(&s7, i, j, 0, b).unwrap();
        let r = decouple(&t, &gens, 4).unwrap();
        rows.push(Row {
            name: format!("decouple sl7 U({i},{j},0,{b})"),
            pass: r.is_solved() == solved && (solved || r.certificate.as_ref().is_some_and(|c| c.augmented_rank == c.span_rank + 1)),
            detail: format!("{:?}", r.status).to_lowercase(),
        });
    }

    let s4 = Arc::new(wfree_sln(4).unwrap());
    let w = |f| Recipe::W { flavor: f };
    let with_u = Catalog::custom(vec![w(2), w(4), Recipe::U(UIndex::new(1, 1, 0, 0).unwrap())]);
    let r = weak_closure(&s4, &with_u, Sector::Invariant, 12, 64, None).unwrap();
    rows.push(Row { name: "weak closure L,W4,U(1,1,0,0)".into(), pass: r.saturated(), detail: format!("{} rounds", r.rounds) });
    let r = weak_closure(&s4, &Catalog::custom(vec![w(2), w(4)]), Sector::Invariant, 6, 64, None).unwrap();
    let w6 = r.weight(6).unwrap();
    rows.push(Row {
        name: "weak closure L,W4 misses weight 6".into(),
        pass: !w6.saturated(),
        detail: format!("{} of {}", w6.reached, w6.full),
    });

    rows.push(Row {
        name: "sl3 curve on (3,0)".into(),
        pass: locus_eval(Locus::Sl3Curve, 3, 0).map(|x| x.is_zero()).unwrap_or(false),
        detail: String::new(),
    });
    let c2 = central_charge(2, 0);
    let vir = (2..6).all(|k| {
        let psi = Rational::from(k);
        let v = Rational::from(13) - Rational::from(6) * &psi - Rational::from(6) / psi.clone();
        c2.evaluate_at(&[(crate::scalars::Param::Psi, psi)]).ok() == Some(v)
    });
    rows.push(Row { name: "Virasoro central charge".into(), pass: vir, detail: String::new() });
    let ab = (4..=12).all(|j| {
        let (a4, b4) = ab_constants(4, j).unwrap();
        let a5 = ab_constants(5, j.max(5)).unwrap().0;
        let j5 = j.max(5) as i64;
        let j = j as i64;
        a4 == Rational::frac(4, j + 1) && b4 == Rational::frac(12, (j + 1) * (j + 2)) && a5 == Rational::frac(20, (j5 + 1) * (j5 + 2))
    });
    rows.push(Row { name: "a_ij, b_ij special cases".into(), pass: ab, detail: String::new() });

    for n in 4..=5 {
        let s = wfree_sln(n).unwrap();
        for sec in [Sector::Invariant, Sector::Full] {
            let ch = character(&s, sec, 20);
            let ok = (0..=10).all(|d| ch.coeff(d) == weight_basis(&s, 2 * d, sec).len() as i128);
            rows.push(Row { name: format!("series sl{n} {}", sec.name()), pass: ok, detail: String::new() });
        }
    }
    rows
}
