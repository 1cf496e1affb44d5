//! Graded dimensions of free differential polynomial algebras.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::freefield::FreeFieldSpec;
use crate::orbifold::Sector;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("n_k is only given by the closed formula for k >= 11, got {0}")]
    OutOfStableRange(u32),
}

pub const DEFAULT_ORDER: u32 = 24;

/// Power series in q^{1/2} truncated at weight `order`; coefficient of q^{w} sits at index 2w.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntSeries {
    coeffs: Vec<i128>,
    order: u32,
}

impl IntSeries {
    pub fn one(order: u32) -> Self {
        let mut coeffs = vec![0; 2 * order as usize + 1];
        coeffs[0] = 1;
        IntSeries { coeffs, order }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Coefficient at doubled weight `w2`.
    pub fn coeff2x(&self, w2: u32) -> i128 {
        self.coeffs.get(w2 as usize).copied().unwrap_or(0)
    }

    pub fn coeff(&self, weight: u32) -> i128 {
        self.coeff2x(2 * weight)
    }

    /// Integer-weight coefficients 0..=order.
    pub fn coefficients(&self) -> Vec<i128> {
        (0..=self.order).map(|w| self.coeff(w)).collect()
    }

    /// All coefficients in steps of q^{1/2}.
    pub fn half_coefficients(&self) -> &[i128] {
        &self.coeffs
    }

    /// Multiply by (1 − s q^{m/2})^{−1}.
    fn geometric(&mut self, m2: usize, s: i128) {
        for i in m2..self.coeffs.len() {
            self.coeffs[i] += s * self.coeffs[i - m2];
        }
    }

    /// Multiply by (1 + s q^{m/2}).
    fn binomial(&mut self, m2: usize, s: i128) {
        for i in (m2..self.coeffs.len()).rev() {
            self.coeffs[i] += s * self.coeffs[i - m2];
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let order = self.order.min(o.order);
        let coeffs = (0..=2 * order as usize).map(|i| self.coeffs[i] + o.coeffs[i]).collect();
        IntSeries { coeffs, order }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let order = self.order.min(o.order);
        let coeffs = (0..=2 * order as usize).map(|i| self.coeffs[i] - o.coeffs[i]).collect();
        IntSeries { coeffs, order }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let order = self.order.min(o.order);
        let len = 2 * order as usize + 1;
        let mut coeffs = vec![0; len];
        for i in 0..len {
            if self.coeffs[i] == 0 {
                continue;
            }
            for j in 0..len - i {
                coeffs[i + j] += self.coeffs[i] * o.coeffs[j];
            }
        }
        IntSeries { coeffs, order }
    }

    fn halve(&self) -> Self {
        IntSeries { coeffs: self.coeffs.iter().map(|c| c / 2).collect(), order: self.order }
    }
}

/// χ(q) when `twisted` is false, the θ-twisted trace χ_θ(q) otherwise.
fn trace(spec: &FreeFieldSpec, order: u32, twisted: bool) -> IntSeries {
    let mut s = IntSeries::one(order);
    let top = 2 * order as usize;
    for g in spec.generators() {
        let sign = if twisted { g.z2sign as i128 } else { 1 };
        let mut m2 = g.weight2x as usize;
        while m2 <= top {
            if g.parity.is_odd() {
                s.binomial(m2, sign);
            } else {
                s.geometric(m2, sign);
            }
            m2 += 2;
        }
    }
    s
}

pub fn character(spec: &FreeFieldSpec, sector: Sector, order: u32) -> IntSeries {
    let full = trace(spec, order, false);
    match sector {
        Sector::Full => full,
        Sector::Invariant => full.add(&trace(spec, order, true)).halve(),
        Sector::AntiInvariant => full.sub(&trace(spec, order, true)).halve(),
    }
}

pub fn invariant_dimension(spec: &FreeFieldSpec, d: u32) -> i128 {
    character(spec, Sector::Invariant, d).coeff(d)
}

/// Stable number of minimal strong generators of weight k.
pub fn nk_formula(k: u32) -> Result<u32, SeriesError> {
    if k < 11 {
        return Err(SeriesError::OutOfStableRange(k));
    }
    let m = k / 4;
    Ok(match k % 4 {
        0 => 3 * m - 2,
        1 => 3 * m - 5,
        2 => 3 * m,
        _ => 3 * m - 4,
    })
}

/// Low-weight counts 2,4,6²,8³,9,10⁵ that precede the closed formula.
pub fn stable_prefix() -> Vec<(u32, u32)> {
    vec![(2, 1), (4, 1), (6, 2), (8, 3), (9, 1), (10, 5)]
}
