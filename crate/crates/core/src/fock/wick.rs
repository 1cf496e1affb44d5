//! n-th products of canonical monomials by Wick contraction.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::One;

use super::monomial::{Leg, Legs, Monomial};
use crate::freefield::FreeFieldSpec;
use crate::scalars::Rational;

fn factorials() -> &'static [BigInt] {
    static TABLE: OnceLock<Vec<BigInt>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut v = vec![BigInt::one()];
        for k in 1..400u32 {
            let next = &v[k as usize - 1] * k;
            v.push(next);
        }
        v
    })
}

fn fact(k: u64) -> &'static BigInt {
    &factorials()[k as usize]
}

pub(crate) fn inv_factorial(k: u64) -> Rational {
    Rational::new(1, fact(k).clone()).expect("nonzero")
}

/// Coefficient of ⟨∂^k g(z) ∂^l h(w)⟩ = value · (z−w)^{−pole}.
fn contraction(m: &Rational, big_k: u64, k: u64, l: u64) -> (Rational, u64) {
    let num = fact(big_k + k + l - 1);
    let den = fact(big_k - 1);
    let mut v = m * &Rational::new(num.clone(), den.clone()).expect("nonzero");
    if k % 2 == 1 {
        v = -v;
    }
    (v, big_k + k + l)
}

struct Ctx<'a> {
    spec: &'a FreeFieldSpec,
    a: &'a [Leg],
    b: &'a [Leg],
    n: i64,
    // for each A leg: (B index, contraction value, pole)
    options: Vec<Vec<(usize, Rational, u64)>>,
    any_odd: bool,
}

/// Calls `emit` with every (monomial, coefficient) term of a_(n) b.
pub(crate) fn monomial_product(
    spec: &FreeFieldSpec,
    a: &Monomial,
    n: i64,
    b: &Monomial,
    emit: &mut dyn FnMut(Monomial, Rational),
) {
    let al = a.legs();
    let bl = b.legs();
    let mut options = Vec::with_capacity(al.len());
    for la in al {
        let mut opts = Vec::new();
        for &(h, ref m) in spec.partners(la.gen as usize) {
            for (j, lb) in bl.iter().enumerate() {
                if lb.gen == h {
                    let big_k = ((spec.weight2x(la.gen as usize) + spec.weight2x(h as usize)) / 2) as u64;
                    let (v, pole) = contraction(m, big_k, la.der as u64, lb.der as u64);
                    opts.push((j, v, pole));
                }
            }
        }
        options.push(opts);
    }
    let any_odd = al.iter().chain(bl.iter()).any(|l| spec.is_odd(l.gen as usize));
    let ctx = Ctx { spec, a: al, b: bl, n, options, any_odd };
    let mut pairs = Vec::new();
    dfs(&ctx, 0, 0u64, 0, Rational::one(), &mut pairs, emit);
}

fn dfs(
    ctx: &Ctx,
    i: usize,
    used: u64,
    pole: u64,
    value: Rational,
    pairs: &mut Vec<(usize, usize)>,
    emit: &mut dyn FnMut(Monomial, Rational),
) {
    if i == ctx.a.len() {
        finish(ctx, used, pole, &value, pairs, emit);
        return;
    }
    dfs(ctx, i + 1, used, pole, value.clone(), pairs, emit);
    for (j, v, p) in &ctx.options[i] {
        if used & (1 << j) != 0 {
            continue;
        }
        pairs.push((i, *j));
        dfs(ctx, i + 1, used | (1 << j), pole + p, &value * v, pairs, emit);
        pairs.pop();
    }
}

fn finish(
    ctx: &Ctx,
    used: u64,
    pole: u64,
    value: &Rational,
    pairs: &[(usize, usize)],
    emit: &mut dyn FnMut(Monomial, Rational),
) {
    let t = pole as i64 - ctx.n - 1;
    if t < 0 {
        return;
    }
    let used_a: u64 = pairs.iter().fold(0, |m, (i, _)| m | (1 << i));
    let rest_a: Vec<usize> = (0..ctx.a.len()).filter(|i| used_a & (1 << i) == 0).collect();
    let rest_b: Vec<usize> = (0..ctx.b.len()).filter(|j| used & (1 << j) == 0).collect();
    if rest_a.is_empty() && t != 0 {
        return;
    }
    let mut value = value.clone();
    if ctx.any_odd && pairing_sign_negative(ctx, pairs, &rest_a, &rest_b) {
        value = -value;
    }
    let mut shifts = vec![0u16; rest_a.len()];
    distribute(ctx, t as u64, 0, &rest_a, &rest_b, &mut shifts, &value, emit);
}

/// Koszul sign of moving legs from (A, B) order to (a₁b₁)(a₂b₂)…(rest A)(rest B).
fn pairing_sign_negative(ctx: &Ctx, pairs: &[(usize, usize)], rest_a: &[usize], rest_b: &[usize]) -> bool {
    let na = ctx.a.len();
    let mut seq: Vec<(usize, bool)> = Vec::new();
    for &(i, j) in pairs {
        seq.push((i, ctx.spec.is_odd(ctx.a[i].gen as usize)));
        seq.push((na + j, ctx.spec.is_odd(ctx.b[j].gen as usize)));
    }
    for &i in rest_a {
        seq.push((i, ctx.spec.is_odd(ctx.a[i].gen as usize)));
    }
    for &j in rest_b {
        seq.push((na + j, ctx.spec.is_odd(ctx.b[j].gen as usize)));
    }
    let mut neg = false;
    for x in 0..seq.len() {
        if !seq[x].1 {
            continue;
        }
        for y in x + 1..seq.len() {
            if seq[y].1 && seq[x].0 > seq[y].0 {
                neg = !neg;
            }
        }
    }
    neg
}

#[allow(clippy::too_many_arguments)]
fn distribute(
    ctx: &Ctx,
    left: u64,
    k: usize,
    rest_a: &[usize],
    rest_b: &[usize],
    shifts: &mut [u16],
    value: &Rational,
    emit: &mut dyn FnMut(Monomial, Rational),
) {
    if k + 1 >= rest_a.len() {
        if let Some(last) = shifts.last_mut() {
            *last = left as u16;
        }
        let mut coeff = value.clone();
        for s in shifts.iter() {
            if *s > 1 {
                coeff *= inv_factorial(*s as u64);
            }
        }
        let legs: Legs = rest_a
            .iter()
            .zip(shifts.iter())
            .map(|(&i, &s)| Leg { gen: ctx.a[i].gen, der: ctx.a[i].der + s })
            .chain(rest_b.iter().map(|&j| ctx.b[j]))
            .collect();
        if let Some((m, neg)) = Monomial::canonical(ctx.spec, legs) {
            emit(m, if neg { -coeff } else { coeff });
        }
        return;
    }
    for s in 0..=left {
        shifts[k] = s as u16;
        distribute(ctx, left - s, k + 1, rest_a, rest_b, shifts, value, emit);
    }
}
