//! Sampling a finite distribution with a sequence of biased coins.
//!
//! Coin `i` has bias `cᵢ = pᵢ / (1 − p₁ − … − p_{i−1})`; flipping the coins in
//! order and stopping at the first heads yields outcome `i` with probability
//! exactly `pᵢ`. Each `cᵢ` lies in the same field as the `pᵢ`, so every coin
//! can itself be built with [`construct_for_algebraic`](super::construct_for_algebraic)
//! via [`FieldElement::as_algebraic`].

use std::cmp::Ordering;

use super::ConstructionError;
use crate::arith::FieldElement;
use crate::hypermatrix::{mass, HypermatrixError};

pub fn sequential_coin_biases(probs: &[FieldElement]) -> Result<Vec<FieldElement>, ConstructionError> {
    if probs.is_empty()
        || probs.iter().any(|p| p.sign() == Ordering::Less)
        || !mass(probs).is_one()
    {
        return Err(HypermatrixError::NotStochastic("distribution for coin sequence".into()).into());
    }
    let mut remaining = FieldElement::one(probs[0].field());
    let mut out = Vec::with_capacity(probs.len());
    for p in probs {
        if remaining.is_zero() {
            out.push(FieldElement::one(p.field()));
            continue;
        }
        out.push(p.checked_div(&remaining)?);
        remaining = &remaining - p;
    }
    Ok(out)
}

/// Index of the first heads; `flip(i)` flips coin `i`.
pub fn sample_sequential(n: usize, mut flip: impl FnMut(usize) -> bool) -> usize {
    (0..n).find(|&i| flip(i)).unwrap_or(n - 1)
}
