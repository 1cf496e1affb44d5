//! Expression grammar for field elements.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary ('*' unary)*
//! unary  := '-' unary | 'D' ['^' int] unary | atom
//! atom   := rational | '(' expr ')' | 'NO' '(' expr ',' expr ')'
//!         | 'prod' '(' expr ',' int ',' expr ')' | 'U' '(' int ',' int ',' int ',' int ')'
//!         | 'L' | 'nu' | generator name
//! ```

use std::sync::Arc;

use num_bigint::BigInt;

use super::Algebra;
use crate::fock::FieldElement;
use crate::orbifold::u_field;
use crate::scalars::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Number(Rational),
    Atom(String),
    U { i: u32, j: u32, a: u32, b: u32 },
    Neg(Box<Expr>),
    Derivative(u32, Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    NormalOrder(Box<Expr>, Box<Expr>),
    Product(Box<Expr>, i64, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("parse error at offset {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Sym(char),
    End,
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let mut out = Vec::new();
    let b = src.as_bytes();
    let mut i = 0;
    while i < b.len() {
        let c = b[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let s = i;
            while i < b.len() && b[i].is_ascii_digit() {
                i += 1;
            }
            out.push((s, Tok::Int(src[s..i].parse().expect("digits"))));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let s = i;
            while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_' || b[i] == b'\'') {
                i += 1;
            }
            out.push((s, Tok::Ident(src[s..i].to_string())));
        } else if "()+-*/,^".contains(c) {
            out.push((i, Tok::Sym(c)));
            i += 1;
        } else {
            let ch = src[i..].chars().next().unwrap();
            return Err(ParseError { offset: i, message: format!("unexpected character {ch:?}") });
        }
    }
    out.push((src.len(), Tok::End));
    Ok(out)
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn fail<T>(&self, what: &str) -> Result<T, ParseError> {
        let found = match self.peek() {
            Tok::End => "end of input".to_string(),
            _ => format!("{:?}", self.src[self.offset()..].chars().next().unwrap_or(' ')),
        };
        Err(ParseError { offset: self.offset(), message: format!("expected {what}, found {found}") })
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.fail(&format!("{c:?}"))
        }
    }

    fn uint(&mut self) -> Result<u32, ParseError> {
        match self.peek().clone() {
            Tok::Int(n) => {
                let off = self.offset();
                self.bump();
                u32::try_from(n).map_err(|_| ParseError { offset: off, message: "integer too large".into() })
            }
            _ => self.fail("a nonnegative integer"),
        }
    }

    fn int(&mut self) -> Result<i64, ParseError> {
        let neg = self.eat('-');
        let v = self.uint()? as i64;
        Ok(if neg { -v } else { v })
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while self.eat('*') {
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if *self.peek() == Tok::Ident("D".into()) {
            self.bump();
            let k = if self.eat('^') { self.uint()? } else { 1 };
            return Ok(Expr::Derivative(k, Box::new(self.unary()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Int(p) => {
                self.bump();
                let mut q = BigInt::from(1);
                if self.eat('/') {
                    let off = self.offset();
                    match self.bump() {
                        Tok::Int(d) if d != BigInt::from(0) => q = d,
                        Tok::Int(_) => return Err(ParseError { offset: off, message: "zero denominator".into() }),
                        _ => {
                            self.pos -= 1;
                            return self.fail("a denominator");
                        }
                    }
                }
                Ok(Expr::Number(Rational::from(p) / Rational::from(q)))
            }
            Tok::Sym('(') => {
                self.bump();
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                match name.as_str() {
                    "NO" => {
                        self.expect('(')?;
                        let a = self.expr()?;
                        self.expect(',')?;
                        let b = self.expr()?;
                        self.expect(')')?;
                        Ok(Expr::NormalOrder(Box::new(a), Box::new(b)))
                    }
                    "prod" => {
                        self.expect('(')?;
                        let a = self.expr()?;
                        self.expect(',')?;
                        let n = self.int()?;
                        self.expect(',')?;
                        let b = self.expr()?;
                        self.expect(')')?;
                        Ok(Expr::Product(Box::new(a), n, Box::new(b)))
                    }
                    "U" if *self.peek() == Tok::Sym('(') => {
                        self.bump();
                        let i = self.uint()?;
                        self.expect(',')?;
                        let j = self.uint()?;
                        self.expect(',')?;
                        let a = self.uint()?;
                        self.expect(',')?;
                        let b = self.uint()?;
                        self.expect(')')?;
                        let (i, j, a, b) = if i > j { (j, i, b, a) } else { (i, j, a, b) };
                        Ok(Expr::U { i, j, a, b })
                    }
                    _ => Ok(Expr::Atom(name)),
                }
            }
            _ => self.fail("an expression"),
        }
    }
}

pub fn parse_expression(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser { src, toks: tokenize(src)?, pos: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.fail("end of input");
    }
    Ok(e)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct EvalError(pub String);

enum Val {
    Scalar(Rational),
    Elem(FieldElement),
}

impl Val {
    fn elem(self, spec: &Arc<crate::freefield::FreeFieldSpec>) -> FieldElement {
        match self {
            Val::Scalar(r) => FieldElement::vacuum(spec).scale_rational(&r),
            Val::Elem(x) => x,
        }
    }
}

fn eval_val(e: &Expr, alg: &Algebra) -> Result<Val, EvalError> {
    let spec = &alg.spec;
    let err = |m: String| EvalError(m);
    Ok(match e {
        Expr::Number(r) => Val::Scalar(r.clone()),
        Expr::Atom(name) => {
            if name == "nu" {
                Val::Elem(alg.nu.clone().ok_or_else(|| err("nu needs a Heisenberg algebra (heis:D)".into()))?)
            } else {
                let lookup = if name == "L" { "W2" } else { name.as_str() };
                let g = spec.index_of(lookup).ok_or_else(|| err(format!("unknown generator {name}")))?;
                Val::Elem(FieldElement::generator(spec, g))
            }
        }
        Expr::U { i, j, a, b } => {
            if *i == 0 {
                return Err(err("U indices i, j must be at least 1".into()));
            }
            Val::Elem(u_field(spec, *i, *j, *a, *b).map_err(|e| err(e.to_string()))?)
        }
        Expr::Neg(x) => match eval_val(x, alg)? {
            Val::Scalar(r) => Val::Scalar(-r),
            Val::Elem(x) => Val::Elem(x.neg()),
        },
        Expr::Derivative(k, x) => match eval_val(x, alg)? {
            Val::Scalar(_) => Val::Scalar(Rational::zero()),
            Val::Elem(x) => Val::Elem(x.derivative_k(*k)),
        },
        Expr::Add(a, b) | Expr::Sub(a, b) => {
            let (x, y) = (eval_val(a, alg)?, eval_val(b, alg)?);
            let sub = matches!(e, Expr::Sub(..));
            match (x, y) {
                (Val::Scalar(x), Val::Scalar(y)) => Val::Scalar(if sub { x - y } else { x + y }),
                (x, y) => {
                    let (x, y) = (x.elem(spec), y.elem(spec));
                    Val::Elem(if sub { x.sub(&y) } else { x.add(&y) })
                }
            }
        }
        Expr::Mul(a, b) => match (eval_val(a, alg)?, eval_val(b, alg)?) {
            (Val::Scalar(x), Val::Scalar(y)) => Val::Scalar(x * y),
            (Val::Scalar(r), Val::Elem(x)) | (Val::Elem(x), Val::Scalar(r)) => Val::Elem(x.scale_rational(&r)),
            _ => return Err(err("'*' multiplies by scalars only; use NO(a, b) for normal ordering".into())),
        },
        Expr::NormalOrder(a, b) => {
            let (x, y) = (eval_val(a, alg)?.elem(spec), eval_val(b, alg)?.elem(spec));
            Val::Elem(x.normal_order(&y).map_err(|e| err(e.to_string()))?)
        }
        Expr::Product(a, n, b) => {
            let (x, y) = (eval_val(a, alg)?.elem(spec), eval_val(b, alg)?.elem(spec));
            Val::Elem(x.nth_product(*n, &y).map_err(|e| err(e.to_string()))?)
        }
    })
}

pub fn evaluate(e: &Expr, alg: &Algebra) -> Result<FieldElement, EvalError> {
    Ok(eval_val(e, alg)?.elem(&alg.spec))
}
