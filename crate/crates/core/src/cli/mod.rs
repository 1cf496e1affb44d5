//! Command-line front end: argument handling, dispatch and JSON payloads.

pub mod expr;
mod suite;

use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use thiserror::Error;

pub use expr::{evaluate, parse_expression, EvalError, Expr, ParseError};

use crate::curves::{curve_json, locus_eval, truncation_curve, Locus};
use crate::fock::FieldElement;
use crate::freefield::{heisenberg_extension, make_standard_algebra, wfree_sln, Family, FreeFieldSpec};
use crate::orbifold::{generator_catalog, Catalog, CatalogKind, Recipe, Sector, UIndex};
use crate::relations::{
    decouple, minimal_generators_cached, verify_identity, weak_closure, BasisCache, IdentityParams,
    DEFAULT_MAX_WORD_DEGREE,
};
use crate::scalars::Rational;
use crate::series::character;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSE: i32 = 2;
pub const EXIT_PARSE: i32 = 3;
pub const EXIT_DOMAIN: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Domain(String),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Parse(_) => EXIT_PARSE,
            CliError::Domain(_) | CliError::Usage(_) => EXIT_DOMAIN,
        }
    }
}

fn domain(e: impl std::fmt::Display) -> CliError {
    CliError::Domain(e.to_string())
}

/// A selected algebra together with what the grammar needs to resolve atoms.
#[derive(Debug, Clone)]
pub struct Algebra {
    pub spec: Arc<FreeFieldSpec>,
    /// n for W-free(sl_n).
    pub rank: Option<u32>,
    pub nu: Option<FieldElement>,
}

impl Algebra {
    /// `wfree-sln:N`, `heis:D`, or `oev|sev|sodd|oodd:N:K`.
    pub fn parse(desc: &str) -> Result<Algebra, CliError> {
        let parts: Vec<&str> = desc.split(':').collect();
        let num = |s: &str| s.parse::<u32>().map_err(|_| domain(format!("bad number {s:?} in algebra {desc:?}")));
        match parts.as_slice() {
            ["wfree-sln", n] => {
                let n = num(n)?;
                Ok(Algebra { spec: Arc::new(wfree_sln(n).map_err(domain)?), rank: Some(n), nu: None })
            }
            ["heis", d] => {
                let d = num(d)?;
                if d == 0 {
                    return Err(domain("heis:D needs D >= 1"));
                }
                let (spec, _, nu) = heisenberg_extension(d);
                let nu = nu.to_rational().expect("nu has rational coefficients");
                Ok(Algebra { spec, rank: None, nu: Some(nu) })
            }
            [fam, n, k] => {
                let family = Family::parse(fam).ok_or_else(|| domain(format!("unknown algebra family {fam:?}")))?;
                let spec = make_standard_algebra(family, num(n)?, num(k)?).map_err(domain)?;
                Ok(Algebra { spec: Arc::new(spec), rank: None, nu: None })
            }
            _ => Err(domain(format!("unknown algebra {desc:?}"))),
        }
    }

    pub fn element(&self, src: &str) -> Result<FieldElement, CliError> {
        let e = parse_expression(src)?;
        evaluate(&e, self).map_err(domain)
    }
}

#[derive(Debug, Parser)]
#[command(name = "vaw", about = "Exact computations in free-field vertex algebras and their Z2-orbifolds")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// wfree-sln:N, heis:D, or oev|sev|sodd|oodd:N:K
    /// [default: wfree-sln:4]
    #[arg(long, global = true)]
    algebra: Option<String>,
    /// Restrict to the Z2-invariant sector.
    #[arg(long, global = true)]
    orbifold: bool,
    /// Directory for cached weight bases (default: $VAW_CACHE).
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate an expression, or list the singular OPE of two.
    Ope {
        expr: String,
        other: Option<String>,
    },
    /// Check a named identity.
    Verify {
        #[arg(long)]
        identity: String,
        /// key=value, e.g. i=2
        #[arg(long = "param")]
        params: Vec<String>,
    },
    /// Express targets through normally ordered words in a catalog.
    Decouple {
        #[arg(long = "target", required = true)]
        targets: Vec<String>,
        #[arg(long, default_value = "strong-free")]
        gens: String,
        /// Generators are taken up to this weight (default: the target weight).
        #[arg(long)]
        weight: Option<u32>,
        #[arg(long, default_value_t = DEFAULT_MAX_WORD_DEGREE)]
        max_degree: usize,
    },
    /// Print a generator catalog.
    Catalog {
        #[arg(long, default_value = "strong-free")]
        kind: String,
        #[arg(long)]
        bound: Option<u32>,
    },
    /// Graded dimensions up to a weight.
    Hilbert {
        #[arg(long)]
        upto: u32,
    },
    /// Free-limit minimal strong generator counts.
    Minimal {
        #[arg(long)]
        bound: u32,
    },
    /// Closure of generators under n-th products.
    WeakClosure {
        /// Comma-separated labels such as L,W4,U(1,1,0,0), or a catalog kind.
        #[arg(long)]
        gens: String,
        #[arg(long)]
        bound: u32,
        #[arg(long, default_value_t = 64)]
        depth: usize,
    },
    /// Truncation curve data for C^psi(n, m).
    Curves {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        locus: Option<String>,
        #[arg(long)]
        psi: Option<String>,
    },
    /// Run the identity library and regression checks.
    Suite {
        /// Print JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandResult {
    pub code: i32,
    pub output: String,
}

impl CommandResult {
    fn json(code: i32, v: &Value) -> Self {
        CommandResult { code, output: serde_json::to_string_pretty(v).expect("json") }
    }
}

/// Runs one invocation; `argv[0]` is the program name.
pub fn run<I, S>(argv: I) -> CommandResult
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_DOMAIN,
            };
            return CommandResult { code, output: e.render().to_string() };
        }
    };
    match dispatch(cli) {
        Ok(r) => r,
        Err(e) => CommandResult::json(e.code(), &json!({"schema": "1", "error": e.to_string(), "code": e.code()})),
    }
}

fn sector(g: &Global) -> Sector {
    if g.orbifold {
        Sector::Invariant
    } else {
        Sector::Full
    }
}

fn cache(g: &Global) -> Result<Option<BasisCache>, CliError> {
    let dir = g.cache.clone().or_else(|| std::env::var_os("VAW_CACHE").map(PathBuf::from));
    dir.map(|d| BasisCache::new(d).map_err(domain)).transpose()
}

fn parse_catalog(alg: &Algebra, kind: &str, bound: Option<u32>) -> Result<Catalog, CliError> {
    let kind = CatalogKind::parse(kind).ok_or_else(|| domain(format!("unknown catalog kind {kind:?}")))?;
    generator_catalog(alg.rank, kind, bound).map_err(domain)
}

fn parse_recipe(label: &str) -> Result<Recipe, CliError> {
    match parse_expression(label)? {
        Expr::Atom(a) if a == "L" => Ok(Recipe::W { flavor: 2 }),
        Expr::Atom(a) if a.starts_with('W') && a[1..].parse::<u32>().is_ok() => {
            Ok(Recipe::W { flavor: a[1..].parse().unwrap() })
        }
        Expr::U { i, j, a, b } => Ok(Recipe::U(UIndex::new(i, j, a, b).map_err(domain)?)),
        _ => Err(domain(format!("{label:?} is not a generator label"))),
    }
}

/// Splits on top-level commas only.
fn split_labels(s: &str) -> Vec<String> {
    let mut out = vec![String::new()];
    let mut depth = 0;
    for c in s.chars() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(String::new());
                continue;
            }
            _ => {}
        }
        out.last_mut().unwrap().push(c);
    }
    out.into_iter().map(|x| x.trim().to_string()).filter(|x| !x.is_empty()).collect()
}

fn dispatch(cli: Cli) -> Result<CommandResult, CliError> {
    let g = &cli.global;
    let alg = Algebra::parse(g.algebra.as_deref().unwrap_or("wfree-sln:4"))?;
    match cli.command {
        Command::Ope { expr, other } => {
            let a = alg.element(&expr)?;
            let Some(other) = other else {
                return Ok(CommandResult::json(
                    EXIT_OK,
                    &json!({"schema": "1", "element": a.to_json(), "pretty": a.pretty()}),
                ));
            };
            let b = alg.element(&other)?;
            let mut poles = Vec::new();
            for n in 0..512i64 {
                let p = a.nth_product(n, &b).map_err(domain)?;
                if !p.is_zero() {
                    poles.push(json!({"n": n, "element": p.to_json(), "pretty": p.pretty()}));
                }
                // a_(n)b vanishes once n exceeds both weights' sum
                if n as u32 * 2 > a.weight2x().unwrap_or(0) + b.weight2x().unwrap_or(0) {
                    break;
                }
            }
            Ok(CommandResult::json(EXIT_OK, &json!({"schema": "1", "products": poles})))
        }
        Command::Verify { identity, params } => {
            let mut p = IdentityParams::default();
            if g.algebra.is_some() {
                p.n = Some(alg.rank.ok_or_else(|| domain("identities live in wfree-sln:N"))?);
            }
            for kv in &params {
                let (k, v) = kv.split_once('=').ok_or_else(|| domain(format!("expected key=value, got {kv:?}")))?;
                let v: u32 = v.parse().map_err(|_| domain(format!("bad value in {kv:?}")))?;
                p.set(k.trim(), v).map_err(domain)?;
            }
            let r = verify_identity(&identity, &p).map_err(domain)?;
            Ok(CommandResult::json(if r.holds { EXIT_OK } else { EXIT_FALSE }, &r.to_json()))
        }
        Command::Decouple { targets, gens, weight, max_degree } => {
            let mut reports = Vec::new();
            let mut all = true;
            for t in &targets {
                let x = alg.element(t)?;
                let w2 = x.weight2x().ok_or_else(|| domain(format!("target {t:?} is not homogeneous")))?;
                let bound = weight.unwrap_or(w2 / 2);
                let cat = parse_catalog(&alg, &gens, Some(bound))?;
                let r = decouple(&x, &cat, max_degree).map_err(domain)?;
                all &= r.is_solved();
                reports.push(json!({"expression": t, "report": r.to_json()}));
            }
            Ok(CommandResult::json(if all { EXIT_OK } else { EXIT_FALSE }, &json!({"schema": "1", "reports": reports})))
        }
        Command::Catalog { kind, bound } => {
            let cat = parse_catalog(&alg, &kind, bound)?;
            let entries: Vec<Value> =
                cat.entries.iter().map(|e| json!({"label": e.label, "weight": e.weight})).collect();
            Ok(CommandResult::json(
                EXIT_OK,
                &json!({"schema": "1", "kind": cat.kind.name(), "n": cat.n, "type": cat.type_string(), "entries": entries}),
            ))
        }
        Command::Hilbert { upto } => {
            let s = character(&alg.spec, sector(g), upto);
            let integral = s.half_coefficients().iter().skip(1).step_by(2).all(|c| *c == 0);
            let v = if integral {
                json!({"schema": "1", "sector": sector(g).name(), "upto": upto, "coefficients": s.coefficients()})
            } else {
                json!({"schema": "1", "sector": sector(g).name(), "upto": upto, "half_coefficients": s.half_coefficients()})
            };
            Ok(CommandResult::json(EXIT_OK, &v))
        }
        Command::Minimal { bound } => {
            let c = cache(g)?;
            let p = minimal_generators_cached(&alg.spec, sector(g), bound, c.as_ref());
            let mut v = p.to_json();
            v["schema"] = json!("1");
            v["sector"] = json!(sector(g).name());
            Ok(CommandResult::json(EXIT_OK, &v))
        }
        Command::WeakClosure { gens, bound, depth } => {
            let cat = match CatalogKind::parse(&gens) {
                Some(_) => parse_catalog(&alg, &gens, Some(bound))?,
                None => Catalog::custom(split_labels(&gens).iter().map(|l| parse_recipe(l)).collect::<Result<_, _>>()?),
            };
            let c = cache(g)?;
            let r = weak_closure(&alg.spec, &cat, sector(g), bound, depth, c.as_ref()).map_err(domain)?;
            Ok(CommandResult::json(if r.saturated() { EXIT_OK } else { EXIT_FALSE }, &r.to_json()))
        }
        Command::Curves { n, m, locus, psi } => {
            let curve = truncation_curve(n, m).map_err(domain)?;
            let locus = locus.map(|l| Locus::parse(&l)).transpose().map_err(domain)?;
            let value = locus.map(|l| locus_eval(l, n, m)).transpose().map_err(domain)?;
            let psi = psi.map(|p| p.parse::<Rational>().map_err(|_| domain(format!("bad rational {p:?}")))).transpose()?;
            let v = curve_json(&curve, locus.zip(value.as_ref()), psi.as_ref()).map_err(domain)?;
            Ok(CommandResult::json(EXIT_OK, &v))
        }
        Command::Suite { json: as_json } => {
            let rows = suite::run_suite();
            let ok = rows.iter().all(|r| r.pass);
            let code = if ok { EXIT_OK } else { EXIT_FALSE };
            if as_json {
                let v: Vec<Value> =
                    rows.iter().map(|r| json!({"check": r.name, "pass": r.pass, "detail": r.detail})).collect();
                return Ok(CommandResult::json(code, &json!({"schema": "1", "passed": ok, "rows": v})));
            }
            let width = rows.iter().map(|r| r.name.len()).max().unwrap_or(0);
            let mut out = String::new();
            for r in &rows {
                out.push_str(&format!("{:<width$}  {}  {}\n", r.name, if r.pass { "PASS" } else { "FAIL" }, r.detail));
            }
            out.push_str(&format!("{} of {} checks passed\n", rows.iter().filter(|r| r.pass).count(), rows.len()));
            Ok(CommandResult { code, output: out })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vaw(args: &[&str]) -> CommandResult {
        run(std::iter::once("vaw").chain(args.iter().copied()))
    }

    #[test]
    fn exit_codes() {
        assert_eq!(vaw(&["verify", "--identity", "wt14", "--algebra", "wfree-sln:4"]).code, EXIT_OK);
        assert_eq!(vaw(&["ope", "prod(W3, )"]).code, EXIT_PARSE);
        assert_eq!(vaw(&["ope", "W3", "--frobnicate"]).code, EXIT_DOMAIN);
        assert_eq!(vaw(&["ope", "W9"]).code, EXIT_DOMAIN);
        assert_eq!(vaw(&["verify", "--identity", "odd8", "--param", "i=2"]).code, EXIT_FALSE);
    }

    #[test]
    fn hilbert_payload() {
        let r = vaw(&["hilbert", "--algebra", "wfree-sln:4", "--orbifold", "--upto", "6"]);
        let v: Value = serde_json::from_str(&r.output).unwrap();
        assert_eq!(v["coefficients"], json!([1, 0, 1, 1, 3, 3, 7]));
        assert_eq!(v["schema"], "1");
    }

    #[test]
    fn labels() {
        assert_eq!(split_labels("L, W4,U(1,1,0,0)"), vec!["L", "W4", "U(1,1,0,0)"]);
        assert_eq!(parse_recipe("U(1,1,0,0)").unwrap(), Recipe::U(UIndex::new(1, 1, 0, 0).unwrap()));
    }

    #[test]
    fn algebras() {
        assert_eq!(Algebra::parse("heis:2").unwrap().spec.len(), 2);
        assert_eq!(Algebra::parse("oodd:3:1").unwrap().spec.len(), 3);
        assert!(Algebra::parse("wfree-sln:x").is_err());
        assert!(Algebra::parse("quux:1").is_err());
        let h = Algebra::parse("heis:1").unwrap();
        assert_eq!(h.element("prod(nu, 1, alpha3)").unwrap(), h.element("4 * D^2 alpha3").unwrap());
    }

    #[test]
    fn suite_passes() {
        let r = vaw(&["suite"]);
        assert_eq!(r.code, EXIT_OK, "{}", r.output);
    }
}
