use serde::{Deserialize, Serialize};

use super::MeasurableSpace;
use crate::error::Result;

/// A measurable set: a sorted, duplicate-free list of atom indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "Vec<usize>", into = "Vec<usize>")]
pub struct AtomSet(Vec<usize>);

impl AtomSet {
    pub fn empty() -> Self {
        AtomSet(Vec::new())
    }

    pub fn full(count: usize) -> Self {
        AtomSet((0..count).collect())
    }

    pub fn singleton(atom: usize) -> Self {
        AtomSet(vec![atom])
    }

    /// Atoms `i` with bit `i` of `mask` set.
    pub fn from_mask(mask: u64) -> Self {
        AtomSet((0..64).filter(|i| mask >> i & 1 == 1).collect())
    }

    /// Bitmask form; `None` if any atom index is 64 or above.
    pub fn to_mask(&self) -> Option<u64> {
        self.0
            .iter()
            .try_fold(0u64, |m, &i| (i < 64).then(|| m | 1 << i))
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, atom: usize) -> bool {
        self.0.binary_search(&atom).is_ok()
    }

    pub fn union(&self, other: &AtomSet) -> AtomSet {
        self.0.iter().chain(other.0.iter()).copied().collect()
    }

    pub fn intersection(&self, other: &AtomSet) -> AtomSet {
        AtomSet(self.iter().filter(|&a| other.contains(a)).collect())
    }

    pub fn difference(&self, other: &AtomSet) -> AtomSet {
        AtomSet(self.iter().filter(|&a| !other.contains(a)).collect())
    }

    pub fn is_disjoint(&self, other: &AtomSet) -> bool {
        self.iter().all(|a| !other.contains(a))
    }

    pub fn is_subset(&self, other: &AtomSet) -> bool {
        self.iter().all(|a| other.contains(a))
    }

    pub fn complement(&self, count: usize) -> AtomSet {
        AtomSet((0..count).filter(|&a| !self.contains(a)).collect())
    }

    pub fn validate(&self, space: &MeasurableSpace) -> Result<()> {
        match self.0.last() {
            Some(&max) => space.check_atom(max),
            None => Ok(()),
        }
    }
}

impl FromIterator<usize> for AtomSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut atoms: Vec<usize> = iter.into_iter().collect();
        atoms.sort_unstable();
        atoms.dedup();
        AtomSet(atoms)
    }
}

impl From<Vec<usize>> for AtomSet {
    fn from(v: Vec<usize>) -> Self {
        v.into_iter().collect()
    }
}

impl From<AtomSet> for Vec<usize> {
    fn from(s: AtomSet) -> Self {
        s.0
    }
}

impl<const N: usize> From<[usize; N]> for AtomSet {
    fn from(a: [usize; N]) -> Self {
        a.into_iter().collect()
    }
}
