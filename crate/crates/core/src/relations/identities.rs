use std::sync::Arc;

use serde_json::json;

use super::RelationsError;
use crate::fock::{FieldElement, Leg};
use crate::freefield::{heisenberg_embedding, wfree_sln, FreeFieldSpec};
use crate::linalg::express;
use crate::orbifold::u_field;
use crate::scalars::Rational;

pub const IDENTITY_NAMES: &[&str] = &[
    "wt14",
    "wt16",
    "odd7",
    "odd8",
    "raise33_3",
    "raise33_1",
    "raise_cross_4",
    "cross_5",
    "square_5",
    "cross_square",
    "lastone",
    "nu_raising",
];

/// Parameters of the identity library; unused ones are ignored.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IdentityParams {
    /// Rank of sl_n; defaults to the smallest rank containing every flavor used.
    pub n: Option<u32>,
    pub i: Option<u32>,
    pub j: Option<u32>,
    pub a: Option<u32>,
    pub m: Option<u32>,
    pub r: Option<u32>,
}

impl IdentityParams {
    pub fn set(&mut self, key: &str, value: u32) -> Result<(), RelationsError> {
        let slot = match key {
            "n" => &mut self.n,
            "i" => &mut self.i,
            "j" => &mut self.j,
            "a" => &mut self.a,
            "m" => &mut self.m,
            "r" => &mut self.r,
            _ => return Err(RelationsError::IdentityDomainError(format!("unknown parameter {key}"))),
        };
        *slot = Some(value);
        Ok(())
    }

    fn get(&self, key: &str, v: Option<u32>, default: Option<u32>, min: u32) -> Result<u32, RelationsError> {
        let x = v.or(default).ok_or_else(|| RelationsError::IdentityDomainError(format!("parameter {key} is required")))?;
        if x < min {
            return Err(RelationsError::IdentityDomainError(format!("parameter {key} = {x} is below {min}")));
        }
        Ok(x)
    }

    fn to_json(&self) -> serde_json::Value {
        let mut m = serde_json::Map::new();
        for (k, v) in [("n", self.n), ("i", self.i), ("j", self.j), ("a", self.a), ("m", self.m), ("r", self.r)] {
            if let Some(v) = v {
                m.insert(k.into(), json!(v));
            }
        }
        serde_json::Value::Object(m)
    }
}

/// One expected coefficient against the coefficient found in the reference basis.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientCheck {
    pub label: String,
    pub expected: Rational,
    pub actual: Option<Rational>,
}

impl CoefficientCheck {
    pub fn holds(&self) -> bool {
        self.actual.as_ref() == Some(&self.expected)
    }
}

#[derive(Debug, Clone)]
pub struct IdentityReport {
    pub name: String,
    pub params: IdentityParams,
    pub holds: bool,
    pub lhs: FieldElement,
    /// The displayed right-hand side; for leading-term identities, only the displayed terms.
    pub rhs: FieldElement,
    pub checks: Vec<CoefficientCheck>,
    /// Leading-term identities: whether lhs minus its leading term lies in the stated span.
    pub remainder_in_span: Option<bool>,
}

impl IdentityReport {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "schema": "1",
            "identity": self.name,
            "params": self.params.to_json(),
            "holds": self.holds,
            "lhs": self.lhs.to_json(),
            "rhs": self.rhs.to_json(),
            "checks": self.checks.iter().map(|c| json!({
                "term": c.label,
                "expected": c.expected.to_string(),
                "actual": c.actual.as_ref().map(|x| x.to_string()),
                "holds": c.holds(),
            })).collect::<Vec<_>>(),
            "remainder_in_span": self.remainder_in_span,
        })
    }
}

fn q(a: i64, b: i64) -> Rational {
    Rational::frac(a, b)
}

fn fact(k: u32) -> Rational {
    Rational::factorial(k as u64)
}

fn algebra(n: u32) -> Result<Arc<FreeFieldSpec>, RelationsError> {
    Ok(Arc::new(wfree_sln(n).map_err(|e| RelationsError::IdentityDomainError(e.to_string()))?))
}

fn no(a: &FieldElement, b: &FieldElement) -> FieldElement {
    a.normal_order(b).expect("same algebra")
}

fn prod(a: &FieldElement, n: i64, b: &FieldElement) -> FieldElement {
    a.nth_product(n, b).expect("same algebra")
}

/// A named basis element ∂^der(x).
struct Term {
    label: String,
    value: FieldElement,
}

fn term(label: impl Into<String>, x: FieldElement, der: u32) -> Term {
    let label = label.into();
    Term { label: if der == 0 { label } else { format!("D^{der} {label}") }, value: x.derivative_k(der) }
}

fn u_label(p: u32, qq: u32, a: u32, b: u32) -> String {
    format!("U^{{{p},{qq}}}_{{{a},{b}}}")
}

struct Outcome {
    lhs: FieldElement,
    rhs: FieldElement,
    checks: Vec<CoefficientCheck>,
    remainder_in_span: Option<bool>,
    exact: bool,
}

/// Full identity lhs = Σ expected_k · basis_k, checked exactly and coefficientwise.
fn exact_identity(lhs: FieldElement, basis: Vec<Term>, expected: Vec<Rational>) -> Outcome {
    let mut rhs = FieldElement::zero(lhs.spec());
    for (t, c) in basis.iter().zip(&expected) {
        rhs = rhs.add(&t.value.scale_rational(c));
    }
    let values: Vec<FieldElement> = basis.iter().map(|t| t.value.clone()).collect();
    let found = express(std::slice::from_ref(&lhs), &values).map(|mut v| v.remove(0));
    let checks = basis
        .iter()
        .zip(expected)
        .enumerate()
        .map(|(k, (t, e))| CoefficientCheck {
            label: t.label.clone(),
            expected: e,
            actual: found.as_ref().map(|v| v[k].clone()),
        })
        .collect();
    let exact = lhs == rhs;
    Outcome { lhs, rhs, checks, remainder_in_span: None, exact }
}

/// lhs = expected · basis[0] + (combination of basis[1..]); only the leading coefficient is displayed.
fn leading_identity(lhs: FieldElement, basis: Vec<Term>, expected: Rational) -> Outcome {
    let rhs = basis[0].value.scale_rational(&expected);
    let values: Vec<FieldElement> = basis.iter().map(|t| t.value.clone()).collect();
    let found = express(std::slice::from_ref(&lhs), &values).map(|mut v| v.remove(0));
    let checks = vec![CoefficientCheck {
        label: basis[0].label.clone(),
        expected,
        actual: found.as_ref().map(|v| v[0].clone()),
    }];
    Outcome { lhs, rhs, checks, remainder_in_span: Some(found.is_some()), exact: true }
}

/// Evaluates a named identity through the engine.
pub fn verify_identity(name: &str, params: &IdentityParams) -> Result<IdentityReport, RelationsError> {
    let p = params;
    let out = match name {
        "wt14" | "wt16" => {
            let n = p.get("n", p.n, Some(3), 3)?;
            let s = algebra(n)?;
            let u = |a, b| u_field(&s, 1, 1, a, b).expect("W3 present");
            let (lhs, top, expected) = if name == "wt14" {
                (
                    no(&u(0, 0), &u(1, 1)).sub(&no(&u(0, 1), &u(0, 1))),
                    8,
                    vec![q(-19, 4032), q(23, 1440), q(-23, 576), q(23, 480), q(-391, 40320)],
                )
            } else {
                (
                    no(&u(0, 0), &u(2, 2)).sub(&no(&u(0, 2), &u(0, 2))),
                    10,
                    vec![q(-1, 7200), q(-1, 72), q(7, 96), q(-7, 32), q(17, 64), q(-31, 576)],
                )
            };
            let basis = (0..=top / 2).map(|k| term(u_label(3, 3, 0, top - 2 * k), u(0, top - 2 * k), 2 * k)).collect();
            exact_identity(lhs, basis, expected)
        }
        "odd7" | "odd8" => {
            let i = p.get("i", p.i, None, 2)?;
            let n = p.get("n", p.n, Some(2 * i + 1), 2 * i + 1)?;
            let s = algebra(n)?;
            let y = 2 * i + 1;
            let (shift, top, expected) = if name == "odd7" { (1, 7, q(11, 5040)) } else { (2, 8, q(1, 2880)) };
            let lhs = no(&u_field(&s, 1, 1, 0, 0)?, &u_field(&s, 1, i, shift, 0)?)
                .sub(&no(&u_field(&s, 1, 1, 0, shift)?, &u_field(&s, 1, i, 0, 0)?));
            exact_identity(lhs, vec![term(u_label(3, y, top, 0), u_field(&s, 1, i, top, 0)?, 0)], vec![expected])
        }
        "raise33_3" | "raise33_1" => {
            let n = p.get("n", p.n, Some(3), 3)?;
            let s = algebra(n)?;
            let u = |a, b| u_field(&s, 1, 1, a, b).expect("W3 present");
            let (mode, k, expected) = if name == "raise33_3" {
                let a = p.get("a", p.a, None, 0)? as i64;
                (3, 2 * a as u32 + 2, q((4 + a) * (15 + 8 * a + 4 * a * a), 30))
            } else {
                let m = p.get("m", p.m, None, 0)? as i64;
                (1, 2 * m as u32 + 4, q(5 + m, 30))
            };
            let src = if mode == 3 { k - 2 } else { k - 4 };
            let lhs = prod(&u(0, 0), mode, &u(0, src));
            let basis = (0..=k / 2).map(|t| term(u_label(3, 3, 0, k - 2 * t), u(0, k - 2 * t), 2 * t)).collect();
            leading_identity(lhs, basis, expected)
        }
        "raise_cross_4" => {
            let i = p.get("i", p.i, None, 2)?;
            let a = p.get("a", p.a, None, 0)?;
            let s = algebra(p.get("n", p.n, Some(2 * i + 1), 2 * i + 1)?)?;
            let lhs = prod(&u_field(&s, 1, 1, 0, 0)?, 4, &u_field(&s, 1, i, a, 0)?);
            let a = a as i64;
            let c = q((2 + a) * (3 + a) * (4 + a) * (5 + a), 60);
            exact_identity(lhs, vec![term(u_label(3, 2 * i + 1, a as u32 + 1, 0), u_field(&s, 1, i, a as u32 + 1, 0)?, 0)], vec![c])
        }
        "cross_5" => {
            let i = p.get("i", p.i, None, 2)?;
            let j = p.get("j", p.j, None, 2)?;
            if i == j {
                return Err(RelationsError::IdentityDomainError("cross_5 needs i != j".into()));
            }
            let a = p.get("a", p.a, None, 0)?;
            let s = algebra(p.get("n", p.n, Some(2 * i.max(j) + 1), 2 * i.max(j) + 1)?)?;
            let lhs = prod(&u_field(&s, 1, i, 0, 0)?, 5, &u_field(&s, 1, j, a, 0)?);
            let c = Rational::binomial(5 + a as i64, 5);
            exact_identity(lhs, vec![term(u_label(2 * i + 1, 2 * j + 1, a, 0), u_field(&s, i, j, a, 0)?, 0)], vec![c])
        }
        "square_5" => {
            let i = p.get("i", p.i, None, 2)?;
            let s = algebra(p.get("n", p.n, Some(2 * i + 1), 2 * i + 1)?)?;
            let y = 2 * i + 1;
            let lhs = prod(&u_field(&s, 1, i, 0, 0)?, 5, &u_field(&s, 1, i, 0, 0)?);
            let c = (fact(4 * i - 5) * Rational::from(4 * (i as i64 - 1))).recip().expect("nonzero");
            exact_identity(
                lhs,
                vec![
                    term(u_label(y, y, 0, 0), u_field(&s, i, i, 0, 0)?, 0),
                    term(u_label(3, 3, 4 * i - 4, 0), u_field(&s, 1, 1, 4 * i - 4, 0)?, 0),
                ],
                vec![Rational::one(), c],
            )
        }
        "cross_square" => {
            let i = p.get("i", p.i, None, 1)?;
            let j = p.get("j", p.j, None, i + 1)?;
            if j <= i {
                return Err(RelationsError::IdentityDomainError("cross_square needs i < j".into()));
            }
            let r = p.get("r", p.r, Some(0), 0)?;
            let s = algebra(p.get("n", p.n, Some(2 * j + 1), 2 * j + 1)?)?;
            let lhs = no(&u_field(&s, i, i, 0, r)?, &u_field(&s, j, j, 0, 0)?)
                .sub(&no(&u_field(&s, i, j, r, 0)?, &u_field(&s, i, j, 0, 0)?));
            let (x, y) = (2 * i + 1, 2 * j + 1);
            let c1 = -fact(4 * j + 2).recip().expect("nonzero");
            let c2 = -(fact(4 * i + 1) * Rational::from((4 * i + 2 + r) as i64)).recip().expect("nonzero");
            exact_identity(
                lhs,
                vec![
                    term(u_label(x, x, 0, 4 * j + 2 + r), u_field(&s, i, i, 0, 4 * j + 2 + r)?, 0),
                    term(u_label(y, y, 0, 4 * i + 2 + r), u_field(&s, j, j, 0, 4 * i + 2 + r)?, 0),
                ],
                vec![c1, c2],
            )
        }
        "lastone" => {
            let i = p.get("i", p.i, None, 2)?;
            let j = p.get("j", p.j, None, i + 1)?;
            if j <= i {
                return Err(RelationsError::IdentityDomainError("lastone needs 2 <= i < j".into()));
            }
            let r = p.get("r", p.r, Some(0), 0)?;
            let s = algebra(p.get("n", p.n, Some(2 * j + 1), 2 * j + 1)?)?;
            let lhs = no(&u_field(&s, 1, i, 0, r)?, &u_field(&s, 1, j, 0, 0)?)
                .sub(&no(&u_field(&s, 1, 1, 0, 0)?, &u_field(&s, i, j, r, 0)?));
            exact_identity(
                lhs,
                vec![term(u_label(2 * i + 1, 2 * j + 1, 6 + r, 0), u_field(&s, i, j, 6 + r, 0)?, 0)],
                vec![q(1, 720)],
            )
        }
        "nu_raising" => {
            let i = p.get("i", p.i, None, 1)?;
            let a = p.get("a", p.a, None, 0)?;
            let (flavors, y) = if i == 1 { (vec![3, 3], 1) } else { (vec![3, 2 * i + 1], 1) };
            let (_, map, nu) =
                heisenberg_embedding(&flavors).map_err(|e| RelationsError::IdentityDomainError(e.to_string()))?;
            let src = map.source.clone();
            let leg = |g: usize, d: u32| FieldElement::from_legs(&src, &[Leg::new(g, d as u16)], Rational::one());
            let uxy = |b: u32, c: u32| no(&leg(0, b), &leg(y, c));
            let image = map.apply(&uxy(0, a)).map_err(|e| RelationsError::IdentityDomainError(e.to_string()))?;
            let raised = nu.nth_product(1, &image).expect("same algebra");
            let lhs = raised.project_to_subalgebra(&map)?;
            let top = a + 2;
            let xname = format!("{}", 3);
            let yname = if i == 1 { "3'".to_string() } else { format!("{}", 2 * i + 1) };
            let basis =
                (0..=top).map(|b| term(format!("U^{{{xname},{yname}}}_{{0,{}}}", top - b), uxy(0, top - b), b)).collect();
            leading_identity(lhs, basis, Rational::from((12 + 2 * a + 4 * i) as i64))
        }
        _ => return Err(RelationsError::IdentityDomainError(format!("unknown identity {name}"))),
    };
    let holds = out.exact && out.remainder_in_span != Some(false) && out.checks.iter().all(|c| c.holds());
    Ok(IdentityReport {
        name: name.to_string(),
        params: params.clone(),
        holds,
        lhs: out.lhs,
        rhs: out.rhs,
        checks: out.checks,
        remainder_in_span: out.remainder_in_span,
    })
}
