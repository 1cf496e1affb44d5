//! Truncation curves of the cosets C^ψ(n, m) in the (c, λ) plane, and related constants.

use serde_json::json;
use thiserror::Error;

use crate::scalars::{Param, ParamRational, Poly, Rational, ScalarError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CurvesError {
    #[error("(n, m) = ({n}, {m}) is outside the parametrized family")]
    OutsideParametrizedFamily { n: u32, m: u32 },
    #[error("unknown locus {0:?}")]
    UnknownLocus(String),
    #[error("a_(i,j), b_(i,j) need 3 <= i <= j, got i = {i}, j = {j}")]
    IndexError { i: u32, j: u32 },
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveFormula {
    pub n: u32,
    pub m: u32,
    pub c: ParamRational,
    pub lambda: ParamRational,
}

impl CurveFormula {
    /// (c, λ) at a point ψ.
    pub fn at(&self, psi: &Rational) -> Result<(Rational, Rational), CurvesError> {
        let a = [(Param::Psi, psi.clone())];
        Ok((self.c.evaluate_at(&a)?, self.lambda.evaluate_at(&a)?))
    }
}

fn admissible(n: u32, m: u32) -> Result<(), CurvesError> {
    if m >= 1 || n >= 3 {
        Ok(())
    } else {
        Err(CurvesError::OutsideParametrizedFamily { n, m })
    }
}

fn lin(a: i64, b: i64) -> Poly {
    Poly::linear(Param::Psi, a, b)
}

/// c(ψ) alone. Unlike λ(ψ) it is defined for every (n, m); at (2, 0) it is the Virasoro
/// central charge while λ has a vanishing denominator.
pub fn central_charge(n: u32, m: u32) -> ParamRational {
    let (n, m) = (n as i64, m as i64);
    let c_num = -&(&(&lin(n, -m - n - 1) * &lin(n - 1, -m - n + 1)) * &lin(n + 1, -m - n));
    ParamRational::new(c_num, &lin(1, -1) * &Poly::var(Param::Psi)).expect("nonzero denominator")
}

pub fn truncation_curve(n: u32, m: u32) -> Result<CurveFormula, CurvesError> {
    admissible(n, m)?;
    let c = central_charge(n, m);
    let (n, m) = (n as i64, m as i64);
    let l_num = -&(&lin(1, -1) * &Poly::var(Param::Psi));
    let l_den = &(&lin(n, -n - m - 2) * &lin(n - 2, -m - n + 2)) * &lin(n + 2, -m - n);
    Ok(CurveFormula {
        n: n as u32,
        m: m as u32,
        c,
        lambda: ParamRational::new(l_num, l_den)?,
    })
}

/// Weight at which C^ψ(n, m) is truncated: its type is W(2, 3, …, (m+1)(m+n+1) − 1).
pub fn weight_threshold(n: u32, m: u32) -> Result<u32, CurvesError> {
    admissible(n, m)?;
    Ok((m + 1) * (m + n + 1) - 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Locus {
    LambdaZero,
    Sl3Curve,
    W4Null,
}

impl Locus {
    pub const ALL: [Locus; 3] = [Locus::LambdaZero, Locus::Sl3Curve, Locus::W4Null];

    pub fn parse(s: &str) -> Result<Locus, CurvesError> {
        match s {
            "lambda_zero" => Ok(Locus::LambdaZero),
            "sl3_curve" => Ok(Locus::Sl3Curve),
            "w4_null" => Ok(Locus::W4Null),
            _ => Err(CurvesError::UnknownLocus(s.to_string())),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Locus::LambdaZero => "lambda_zero",
            Locus::Sl3Curve => "sl3_curve",
            Locus::W4Null => "w4_null",
        }
    }

    /// The defining polynomial in c and λ.
    pub fn polynomial(self) -> ParamRational {
        let l = Poly::var(Param::Lambda);
        let c = Poly::var(Param::C);
        let p = match self {
            Locus::LambdaZero => l,
            Locus::Sl3Curve => &(&Poly::constant(-8) + &l.scale(&22.into())) + &(&l * &c).scale(&5.into()),
            Locus::W4Null => &Poly::constant(-125) + &(&l * &Poly::linear(Param::C, 1, 2)).scale(&32.into()),
        };
        ParamRational::from_poly(p)
    }
}

/// The locus polynomial pulled back along the (n, m) curve, as a function of ψ.
pub fn locus_eval(locus: Locus, n: u32, m: u32) -> Result<ParamRational, CurvesError> {
    let curve = truncation_curve(n, m)?;
    Ok(locus.polynomial().substitute(&[(Param::C, curve.c), (Param::Lambda, curve.lambda)])?)
}

/// The scalar in (W⁴)_(5)W⁴ = s·L for the universal algebra, −4/3·(−125 + 32λ(2 + c)).
/// Quoted from the literature; nothing here checks it.
pub fn w4_fifth_product_scalar() -> ParamRational {
    &ParamRational::constant(&Rational::frac(-4, 3)) * &Locus::W4Null.polynomial()
}

/// a_{i,j} = i!/(6·(j+1)⋯(j+i−3)) and b_{i,j} = i!(i−1)/(6·(j+1)⋯(j+i−2)).
pub fn ab_constants(i: u32, j: u32) -> Result<(Rational, Rational), CurvesError> {
    if i < 3 || j < i {
        return Err(CurvesError::IndexError { i, j });
    }
    let rising = |top: u32| (j + 1..=j + top).fold(Rational::one(), |acc, k| acc * Rational::from(k as i64));
    let f = Rational::factorial(i as u64);
    let six = Rational::from(6);
    let a = &f / &(&six * &rising(i - 3));
    let b = &(&f * &Rational::from(i as i64 - 1)) / &(&six * &rising(i - 2));
    Ok((a, b))
}

pub fn curve_json(curve: &CurveFormula, locus: Option<(Locus, &ParamRational)>, psi: Option<&Rational>) -> Result<serde_json::Value, CurvesError> {
    let mut out = json!({
        "schema": "1",
        "n": curve.n,
        "m": curve.m,
        "threshold": weight_threshold(curve.n, curve.m)?,
        "c": curve.c.to_string(),
        "lambda": curve.lambda.to_string(),
    });
    if let Some((l, v)) = locus {
        out["locus"] = json!(l.name());
        out["locus_value"] = json!(v.to_string());
        out["locus_identically_zero"] = json!(v.is_zero());
    }
    if let Some(p) = psi {
        let (c, l) = curve.at(p)?;
        out["psi"] = json!(p.to_string());
        out["at_psi"] = json!({ "c": c.to_string(), "lambda": l.to_string() });
        if let Some((_, v)) = locus {
            out["at_psi"]["locus_value"] = json!(v.evaluate_at(&[(Param::Psi, p.clone())])?.to_string());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn psi_fn(num: Poly, den: Poly) -> ParamRational {
        ParamRational::new(num, den).unwrap()
    }

    #[test]
    fn virasoro_case() {
        assert!(matches!(truncation_curve(2, 0), Err(CurvesError::OutsideParametrizedFamily { .. })));
        let psi = Poly::var(Param::Psi);
        let vir = psi_fn(&(&lin(-6, 13) * &psi) - &Poly::constant(6), psi.clone());
        assert_eq!(central_charge(2, 0), vir);
    }

    #[test]
    fn sl3_lambda() {
        let f = truncation_curve(3, 0).unwrap();
        let psi = Poly::var(Param::Psi);
        let expected = psi_fn(-&psi, &lin(3, -5) * &lin(5, -3));
        assert_eq!(f.lambda, expected);
    }

    #[test]
    fn loci() {
        assert!(locus_eval(Locus::Sl3Curve, 3, 0).unwrap().is_zero());
        let lz = locus_eval(Locus::LambdaZero, 3, 0).unwrap();
        assert!(!lz.is_zero());
        // w4_null along (n, m) = (1, 1) at ψ = 2
        let w = locus_eval(Locus::W4Null, 1, 1).unwrap();
        assert!(!w.evaluate_at(&[(Param::Psi, Rational::from(2))]).unwrap().is_zero());
        assert!(matches!(Locus::parse("x"), Err(CurvesError::UnknownLocus(_))));
    }

    #[test]
    fn thresholds() {
        assert_eq!(weight_threshold(1, 1).unwrap(), 5);
        assert_eq!(weight_threshold(3, 0).unwrap(), 3);
        assert!(weight_threshold(1, 0).is_err());
    }

    #[test]
    fn ab_values() {
        for j in 3..=12 {
            assert_eq!(ab_constants(3, j).unwrap().0, Rational::one());
        }
        assert_eq!(ab_constants(4, 5).unwrap().0, Rational::frac(2, 3));
        assert_eq!(ab_constants(4, 4).unwrap().1, Rational::frac(2, 5));
        assert!(matches!(ab_constants(2, 5), Err(CurvesError::IndexError { .. })));
        assert!(ab_constants(5, 4).is_err());
    }
}
