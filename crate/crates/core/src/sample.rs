//! Seeded generators for random measures, kernels and maps.
//!
//! Sweeps derive one ChaCha stream per `(tag, trial)` from a base seed, so a
//! trial's draws depend only on its index and never on evaluation order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::measure::{BanachSpace, MeasurableSpace, PositiveMeasure, SignedMeasure, VectorMeasure};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream for trial `trial` of sweep `tag`.
pub fn trial_rng(seed: u64, tag: u64, trial: u64) -> SeededRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(tag << 40 ^ trial);
    r
}

/// Atoms are empty with probability 1/5, otherwise uniform on `(0, scale)`.
pub fn positive(space: &MeasurableSpace, scale: f64, rng: &mut impl Rng) -> PositiveMeasure {
    let mass = (0..space.count())
        .map(|_| if rng.random_bool(0.2) { 0.0 } else { rng.random_range(0.0..scale) })
        .collect();
    PositiveMeasure::new(space.clone(), mass).expect("nonnegative masses")
}

/// Like [`positive`] but never the zero measure.
pub fn nonzero_positive(space: &MeasurableSpace, scale: f64, rng: &mut impl Rng) -> PositiveMeasure {
    loop {
        let mu = positive(space, scale, rng);
        if mu.total() > 0.0 {
            return mu;
        }
    }
}

pub fn signed(space: &MeasurableSpace, scale: f64, rng: &mut impl Rng) -> SignedMeasure {
    let mass = (0..space.count())
        .map(|_| if rng.random_bool(0.2) { 0.0 } else { rng.random_range(-scale..scale) })
        .collect();
    SignedMeasure::new(space.clone(), mass).expect("finite masses")
}

pub fn vector(space: &MeasurableSpace, codomain: BanachSpace, scale: f64, rng: &mut impl Rng) -> VectorMeasure {
    let values = (0..space.count())
        .map(|_| {
            if rng.random_bool(0.15) {
                codomain.zero()
            } else {
                (0..codomain.dim()).map(|_| rng.random_range(-scale..scale)).collect()
            }
        })
        .collect();
    VectorMeasure::new(space.clone(), codomain, values).expect("finite values")
}

/// Random labelling of atoms into two sides; returns membership of side one.
pub fn split_atoms(count: usize, rng: &mut impl Rng) -> Vec<bool> {
    (0..count).map(|_| rng.random_bool(0.5)).collect()
}

/// Two positive measures with disjoint supports.
pub fn singular_pair(space: &MeasurableSpace, scale: f64, rng: &mut impl Rng) -> (PositiveMeasure, PositiveMeasure) {
    let side = split_atoms(space.count(), rng);
    let base = positive(space, scale, rng);
    let pick = |want: bool| {
        let mass = base
            .mass()
            .iter()
            .zip(&side)
            .map(|(&m, &s)| if s == want { m } else { 0.0 })
            .collect();
        PositiveMeasure::new(space.clone(), mass).expect("nonnegative masses")
    };
    (pick(true), pick(false))
}

/// Two signed measures with disjoint supports.
pub fn signed_singular_pair(space: &MeasurableSpace, scale: f64, rng: &mut impl Rng) -> (SignedMeasure, SignedMeasure) {
    let side = split_atoms(space.count(), rng);
    let base = signed(space, scale, rng);
    let pick = |want: bool| {
        let mass = base
            .mass()
            .iter()
            .zip(&side)
            .map(|(&m, &s)| if s == want { m } else { 0.0 })
            .collect();
        SignedMeasure::new(space.clone(), mass).expect("finite masses")
    };
    (pick(true), pick(false))
}

/// `rows × cols` nonnegative matrix whose rows each sum to one.
pub fn stochastic_kernel(rows: usize, cols: usize, rng: &mut impl Rng) -> Vec<Vec<f64>> {
    (0..rows)
        .map(|_| {
            let mut row: Vec<f64> = (0..cols)
                .map(|_| if rng.random_bool(0.25) { 0.0 } else { rng.random_range(0.0..1.0) })
                .collect();
            if row.iter().all(|&x| x == 0.0) {
                row[rng.random_range(0..cols)] = 1.0;
            }
            let total: f64 = row.iter().sum();
            row.iter_mut().for_each(|x| *x /= total);
            row
        })
        .collect()
}

pub fn map(domain: usize, codomain: usize, rng: &mut impl Rng) -> Vec<usize> {
    (0..domain).map(|_| rng.random_range(0..codomain)).collect()
}

/// Injective map; requires `codomain >= domain`.
pub fn injective_map(domain: usize, codomain: usize, rng: &mut impl Rng) -> Vec<usize> {
    assert!(codomain >= domain, "no injection from {domain} into {codomain} atoms");
    let mut targets: Vec<usize> = (0..codomain).collect();
    for i in 0..domain {
        let j = rng.random_range(i..codomain);
        targets.swap(i, j);
    }
    targets.truncate(domain);
    targets
}
