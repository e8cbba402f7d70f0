//! Variation of a vector measure.
//!
//! On a finite space the atomic partition refines every other partition, and
//! refining never decreases `sum ||omega(B)||`, so `|omega|` is computed atom
//! by atom. [`total_variation_oracle`] evaluates the defining supremum
//! literally by enumerating every set partition and exists to cross-check the
//! fast path.

use super::banach::add_assign;
use super::{AtomSet, BanachSpace, PositiveMeasure, VectorMeasure};
use crate::error::{Error, Result};

/// Largest set the partition oracle will enumerate (Bell(10) = 115975).
pub const ORACLE_LIMIT: usize = 10;

/// `|omega|` as a positive measure: `|omega|(a) = ||omega(a)||`.
pub fn total_variation(omega: &VectorMeasure) -> PositiveMeasure {
    let codomain = omega.codomain();
    let mass = omega.values().iter().map(|v| codomain.norm(v)).collect();
    PositiveMeasure::new(omega.space().clone(), mass).expect("norms are finite and nonnegative")
}

/// `sup { sum_{B in pi} ||omega(B)|| }` over all finite partitions `pi` of `set`.
pub fn total_variation_oracle(omega: &VectorMeasure, set: &AtomSet) -> Result<f64> {
    set.validate(omega.space())?;
    if set.len() > ORACLE_LIMIT {
        return Err(Error::TooLargeForEnumeration {
            size: set.len(),
            limit: ORACLE_LIMIT,
        });
    }
    let items: Vec<&[f64]> = set.iter().map(|a| omega.value(a)).collect();
    Ok(max_partition_sum(&items, omega.codomain()))
}

/// Maximum over all set partitions of `items` of the summed block norms.
/// Exponential in `items.len()`; callers bound the size.
pub fn max_partition_sum(items: &[&[f64]], codomain: &BanachSpace) -> f64 {
    if items.is_empty() {
        return 0.0;
    }
    let mut blocks: Vec<Vec<f64>> = Vec::with_capacity(items.len());
    let mut best = f64::NEG_INFINITY;
    search(items, codomain, &mut blocks, &mut best);
    best
}

fn search(items: &[&[f64]], codomain: &BanachSpace, blocks: &mut Vec<Vec<f64>>, best: &mut f64) {
    let Some((head, rest)) = items.split_first() else {
        let total: f64 = blocks.iter().map(|b| codomain.norm(b)).sum();
        *best = best.max(total);
        return;
    };
    for j in 0..blocks.len() {
        let saved = blocks[j].clone();
        add_assign(&mut blocks[j], head);
        search(rest, codomain, blocks, best);
        blocks[j] = saved;
    }
    blocks.push(head.to_vec());
    search(rest, codomain, blocks, best);
    blocks.pop();
}

/// Calls `f` once per set partition of `0..n`, encoded as a restricted growth
/// string (`labels[i]` is the block of element `i`).
pub fn for_each_partition(n: usize, mut f: impl FnMut(&[usize])) {
    fn go(labels: &mut Vec<usize>, n: usize, blocks: usize, f: &mut dyn FnMut(&[usize])) {
        if labels.len() == n {
            f(labels);
            return;
        }
        for b in 0..=blocks {
            labels.push(b);
            go(labels, n, blocks.max(b + 1), f);
            labels.pop();
        }
    }
    go(&mut Vec::with_capacity(n), n, 0, &mut f);
}
