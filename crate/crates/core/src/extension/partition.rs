//! Simultaneous step-function approximation of finitely many measures.
//!
//! Given `μ_1..μ_n` with sum `μ`, each density `f_i = dμ_i/dμ` is quantized
//! from below into bins of width `δ = ε / (n μ(X))`. Atoms sharing all `n`
//! bin indices form one class `S`, and
//!
//! `μ_i = Σ_S α_{i,S} μ|_S + κ_i`
//!
//! with `α_{i,S}` the lower bin edge and `κ_i` the nonnegative remainder.
//! Each `κ_i(X) < δ μ(X) = ε/n`, so the remainders sum to less than `ε`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{AtomSet, MeasurableSpace, PositiveMeasure};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionClass {
    pub atoms: AtomSet,
    /// `α_{i,S}` for each input measure `i`.
    pub coefficients: Vec<f64>,
    /// Atoms where `μ` vanishes; all coefficients are zero.
    pub null: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionApproximation {
    pub epsilon: f64,
    pub bin_width: f64,
    /// `μ = Σ μ_i`.
    pub reference: PositiveMeasure,
    /// Class index of each atom; `None` only when `μ` is the zero measure.
    pub labels: Vec<Option<usize>>,
    pub classes: Vec<PartitionClass>,
    pub remainders: Vec<PositiveMeasure>,
    /// `Σ_i κ_i(X)`.
    pub remainder_total: f64,
}

impl PartitionApproximation {
    pub fn measure_count(&self) -> usize {
        self.remainders.len()
    }

    /// `Σ_S α_{i,S} μ|_S + κ_i`, atom by atom.
    pub fn reconstruct(&self, i: usize) -> Result<PositiveMeasure> {
        let kappa = self.remainders.get(i).ok_or_else(|| {
            Error::InvalidParameter(format!("measure index {i} out of range for {}", self.measure_count()))
        })?;
        let mass = self
            .labels
            .iter()
            .zip(self.reference.mass())
            .zip(kappa.mass())
            .map(|((label, &m), &k)| match label {
                Some(s) => self.classes[*s].coefficients[i] * m + k,
                None => k,
            })
            .collect();
        PositiveMeasure::new(self.reference.space().clone(), mass)
    }

    /// `Σ_S α_{i,S} μ(B ∩ S) + κ_i(B)`.
    pub fn reconstruct_on(&self, i: usize, set: &AtomSet) -> Result<f64> {
        self.reconstruct(i)?.measure_of(set)
    }
}

pub fn lemma1_partition(measures: &[PositiveMeasure], epsilon: f64) -> Result<PartitionApproximation> {
    let first = measures
        .first()
        .ok_or_else(|| Error::InvalidParameter("at least one measure is required".into()))?;
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
    }
    let space: &MeasurableSpace = first.space();
    for mu in &measures[1..] {
        space.ensure_compatible(mu.space())?;
    }
    let n = measures.len();
    let count = space.count();
    let reference_mass: Vec<f64> = (0..count)
        .map(|a| measures.iter().map(|mu| mu.mass()[a]).sum())
        .collect();
    let reference = PositiveMeasure::new(space.clone(), reference_mass)?;
    let total = reference.total();

    if total == 0.0 {
        return Ok(PartitionApproximation {
            epsilon,
            bin_width: f64::INFINITY,
            reference,
            labels: vec![None; count],
            classes: Vec::new(),
            remainders: vec![PositiveMeasure::zero(space.clone()); n],
            remainder_total: 0.0,
        });
    }

    let delta = epsilon / (n as f64 * total);
    let mut bins = vec![vec![0u64; n]; count];
    let mut remainders = vec![vec![0.0; count]; n];
    for a in 0..count {
        let m = reference.mass()[a];
        if m == 0.0 {
            continue;
        }
        for (i, mu) in measures.iter().enumerate() {
            let mass = mu.mass()[a];
            let density = mass / m;
            let mut bin = (density / delta).floor() as u64;
            // the remainder must land in [0, δ m); rounding can push it out
            let mut kappa = mass - bin as f64 * delta * m;
            while kappa < 0.0 && bin > 0 {
                bin -= 1;
                kappa = mass - bin as f64 * delta * m;
            }
            while kappa >= delta * m {
                bin += 1;
                kappa = mass - bin as f64 * delta * m;
            }
            bins[a][i] = bin;
            remainders[i][a] = kappa.max(0.0);
        }
    }

    // classes are numbered in order of first appearance along the atoms
    let mut index: BTreeMap<Option<&[u64]>, usize> = BTreeMap::new();
    let mut classes: Vec<PartitionClass> = Vec::new();
    let mut labels = Vec::with_capacity(count);
    for (&m, bin) in reference.mass().iter().zip(&bins) {
        let key = (m > 0.0).then_some(bin.as_slice());
        let s = *index.entry(key).or_insert_with(|| {
            classes.push(PartitionClass {
                atoms: AtomSet::empty(),
                coefficients: match key {
                    Some(b) => b.iter().map(|&k| k as f64 * delta).collect(),
                    None => vec![0.0; n],
                },
                null: key.is_none(),
            });
            classes.len() - 1
        });
        labels.push(Some(s));
    }
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); classes.len()];
    for (a, label) in labels.iter().enumerate() {
        members[label.expect("labelled")].push(a);
    }
    for (class, atoms) in classes.iter_mut().zip(members) {
        class.atoms = AtomSet::from(atoms);
    }

    let remainders = remainders
        .into_iter()
        .map(|k| PositiveMeasure::new(space.clone(), k))
        .collect::<Result<Vec<_>>>()?;
    let remainder_total = remainders.iter().map(PositiveMeasure::total).sum();
    Ok(PartitionApproximation {
        epsilon,
        bin_width: delta,
        reference,
        labels,
        classes,
        remainders,
        remainder_total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample;
    use rand::Rng;

    fn atomic(mass: &[f64]) -> PositiveMeasure {
        PositiveMeasure::new(MeasurableSpace::atomic(mass.len()).unwrap(), mass.to_vec()).unwrap()
    }

    fn check(approx: &PartitionApproximation, measures: &[PositiveMeasure]) {
        assert!(approx.remainder_total < approx.epsilon);
        for (i, mu) in measures.iter().enumerate() {
            // oracle: μ_i(a) − α μ(a) summed directly from the class table
            for a in 0..mu.mass().len() {
                let s = approx.labels[a].unwrap();
                let alpha = approx.classes[s].coefficients[i];
                assert!(alpha >= 0.0);
                let kappa = mu.mass()[a] - alpha * approx.reference.mass()[a];
                assert!(kappa >= -1e-15);
                assert!((kappa - approx.remainders[i].mass()[a]).abs() <= 1e-12);
            }
            let rebuilt = approx.reconstruct(i).unwrap();
            assert!(rebuilt.to_signed().approx_eq(&mu.to_signed(), 1e-12));
        }
    }

    #[test]
    fn equal_measures_share_one_class() {
        // δ = 0.1 / (2 · 2) = 0.025 divides 0.5 exactly
        let mu = atomic(&[0.5, 0.5]);
        let approx = lemma1_partition(&[mu.clone(), mu.clone()], 0.1).unwrap();
        assert_eq!(approx.classes.len(), 1);
        assert_eq!(approx.classes[0].coefficients, vec![0.5, 0.5]);
        assert_eq!(approx.remainder_total, 0.0);
        check(&approx, &[mu.clone(), mu]);
    }

    #[test]
    fn disjoint_measures_split_cleanly() {
        let a = atomic(&[1.0, 2.0, 0.0, 0.0]);
        let b = atomic(&[0.0, 0.0, 3.0, 0.5]);
        let approx = lemma1_partition(&[a.clone(), b.clone()], 0.01).unwrap();
        assert_eq!(approx.classes.len(), 2);
        assert!(approx.remainder_total < 1e-12);
        let alpha = &approx.classes[0].coefficients;
        assert!((alpha[0] - 1.0).abs() < 1e-12 && alpha[1] == 0.0);
        check(&approx, &[a, b]);
    }

    #[test]
    fn null_atoms_get_their_own_class() {
        let a = atomic(&[1.0, 0.0, 2.0]);
        let b = atomic(&[1.0, 0.0, 0.0]);
        let approx = lemma1_partition(&[a.clone(), b.clone()], 0.05).unwrap();
        let null: Vec<_> = approx.classes.iter().filter(|c| c.null).collect();
        assert_eq!(null.len(), 1);
        assert_eq!(null[0].atoms, AtomSet::singleton(1));
        check(&approx, &[a, b]);
    }

    #[test]
    fn zero_input_is_trivial() {
        let z = atomic(&[0.0, 0.0]);
        let approx = lemma1_partition(std::slice::from_ref(&z), 0.1).unwrap();
        assert!(approx.classes.is_empty());
        assert_eq!(approx.reconstruct(0).unwrap(), z);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(lemma1_partition(&[], 0.1).is_err());
        assert!(lemma1_partition(&[atomic(&[1.0])], 0.0).is_err());
        assert!(lemma1_partition(&[atomic(&[1.0]), atomic(&[1.0, 2.0])], 0.1).is_err());
    }

    #[test]
    fn random_grid_densities() {
        let mut rng = sample::rng(17);
        let grid = MeasurableSpace::grid(64).unwrap();
        for _ in 0..50 {
            let measures: Vec<PositiveMeasure> = (0..3)
                .map(|_| {
                    let density: Vec<f64> = (0..64).map(|_| rng.random_range(0.0..4.0)).collect();
                    PositiveMeasure::from_density(grid.clone(), &density).unwrap()
                })
                .collect();
            let approx = lemma1_partition(&measures, 0.01).unwrap();
            check(&approx, &measures);
        }
    }
}
