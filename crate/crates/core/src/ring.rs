//! Rings of subsets of a finite ground set, set functions on them, and their
//! extension through signed representations `S ≃ Σ α_n A_n`.
//!
//! On a finite ground every series is a finite sum, so the summability
//! condition on `Σ μ(A_n)` holds automatically and only the pointwise
//! condition `S(x) = Σ α_n A_n(x)` has to be checked.
//!
//! Sets are handled internally as `u32` bitmasks (at most
//! [`MAX_RING_ATOMS`] atoms).

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{add_assign, axpy, for_each_partition, AtomSet, BanachSpace, MeasurableSpace, SpaceKind, NORM_TOL, ORACLE_LIMIT};

pub const MAX_RING_ATOMS: usize = 16;

/// Longest representation [`represent`] will search for.
pub const MAX_SEARCH_TERMS: usize = 8;

pub const DEFAULT_MAX_TERMS: usize = 6;

/// Tolerance for "sums to the zero vector".
pub const EMPTY_TOL: f64 = 1e-12;

const NOT_MEMBER: u32 = u32::MAX;

fn mask_of(set: &AtomSet) -> u32 {
    set.iter().fold(0, |m, a| m | 1 << a)
}

fn set_of(mask: u32) -> AtomSet {
    AtomSet::from_mask(mask as u64)
}

/// A family of atom sets closed under union and difference.
#[derive(Debug, Clone)]
pub struct SetRing {
    ground: MeasurableSpace,
    generators: Vec<AtomSet>,
    /// Members in lexicographic order of their sorted index lists.
    members: Vec<AtomSet>,
    masks: Vec<u32>,
    /// `rank[mask]` is the member index of `mask`, or `NOT_MEMBER`.
    rank: Vec<u32>,
    /// Minimal nonempty members; every member is a union of cells.
    cells: Vec<u32>,
}

/// The least ring on `ground` containing `generators`.
///
/// The generators split their union into cells (classes of atoms lying in
/// exactly the same generators). Cells are closed under `∩` and `∖` of the
/// generators, and the ring is every union of cells.
pub fn ring_closure(ground: &MeasurableSpace, generators: &[AtomSet]) -> Result<SetRing> {
    if ground.kind() != SpaceKind::Atomic {
        return Err(Error::InvalidRing("rings are built over atomic grounds".into()));
    }
    if ground.count() > MAX_RING_ATOMS {
        return Err(Error::TooLargeForEnumeration {
            size: ground.count(),
            limit: MAX_RING_ATOMS,
        });
    }
    for g in generators {
        g.validate(ground)?;
    }

    let union = generators.iter().fold(0u32, |m, g| m | mask_of(g));
    let mut cells = if union == 0 { vec![] } else { vec![union] };
    for g in generators.iter().map(mask_of) {
        cells = cells
            .into_iter()
            .flat_map(|c| [c & g, c & !g])
            .filter(|&c| c != 0)
            .collect();
    }
    cells.sort_unstable();

    let mut members: Vec<AtomSet> = (0u64..1 << cells.len())
        .map(|pick| {
            let mask = cells
                .iter()
                .enumerate()
                .filter(|(i, _)| pick >> i & 1 == 1)
                .fold(0u32, |m, (_, c)| m | c);
            set_of(mask)
        })
        .collect();
    members.sort();

    let masks: Vec<u32> = members.iter().map(mask_of).collect();
    let mut rank = vec![NOT_MEMBER; 1 << ground.count()];
    for (i, &m) in masks.iter().enumerate() {
        rank[m as usize] = i as u32;
    }
    Ok(SetRing {
        ground: ground.clone(),
        generators: generators.to_vec(),
        members,
        masks,
        rank,
        cells,
    })
}

impl SetRing {
    pub fn ground(&self) -> &MeasurableSpace {
        &self.ground
    }

    pub fn generators(&self) -> &[AtomSet] {
        &self.generators
    }

    pub fn members(&self) -> &[AtomSet] {
        &self.members
    }

    pub fn cells(&self) -> Vec<AtomSet> {
        self.cells.iter().map(|&c| set_of(c)).collect()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, set: &AtomSet) -> bool {
        self.index_of(set).is_some()
    }

    /// Position of `set` in [`SetRing::members`].
    pub fn index_of(&self, set: &AtomSet) -> Option<usize> {
        if set.validate(&self.ground).is_err() {
            return None;
        }
        match self.rank[mask_of(set) as usize] {
            NOT_MEMBER => None,
            r => Some(r as usize),
        }
    }

    fn rank_of_mask(&self, mask: u32) -> Option<usize> {
        match self.rank[mask as usize] {
            NOT_MEMBER => None,
            r => Some(r as usize),
        }
    }

    fn full_mask(&self) -> u32 {
        ((1u64 << self.ground.count()) - 1) as u32
    }
}

/// A set function `R -> E`, possibly non-additive.
#[derive(Debug, Clone)]
pub struct RingSetFunction {
    ring: SetRing,
    codomain: BanachSpace,
    /// Aligned with `ring.members()`.
    values: Vec<Vec<f64>>,
}

impl RingSetFunction {
    /// `f(A) = Σ_{a∈A} w(a)`; additive by construction.
    pub fn induced(ring: SetRing, codomain: BanachSpace, weights: &[Vec<f64>]) -> Result<Self> {
        if weights.len() != ring.ground.count() {
            return Err(Error::InvalidParameter(format!(
                "{} weights for {} atoms",
                weights.len(),
                ring.ground.count()
            )));
        }
        for w in weights {
            codomain.check_vector(w)?;
        }
        let values = ring
            .members
            .iter()
            .map(|m| {
                let mut acc = codomain.zero();
                for a in m.iter() {
                    add_assign(&mut acc, &weights[a]);
                }
                acc
            })
            .collect();
        Ok(RingSetFunction {
            ring,
            codomain,
            values,
        })
    }

    /// Raw assignment; every member must receive exactly one value.
    pub fn from_assignment(ring: SetRing, codomain: BanachSpace, assignment: Vec<(AtomSet, Vec<f64>)>) -> Result<Self> {
        let mut values: Vec<Option<Vec<f64>>> = vec![None; ring.len()];
        for (set, value) in assignment {
            codomain.check_vector(&value)?;
            let i = ring
                .index_of(&set)
                .ok_or_else(|| Error::InvalidRing(format!("assigned set {:?} is not a ring member", set.indices())))?;
            if values[i].replace(value).is_some() {
                return Err(Error::InvalidRing(format!("set {:?} assigned twice", set.indices())));
            }
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                v.ok_or_else(|| {
                    Error::InvalidRing(format!("member {:?} has no assigned value", ring.members[i].indices()))
                })
            })
            .collect::<Result<_>>()?;
        Ok(RingSetFunction {
            ring,
            codomain,
            values,
        })
    }

    pub fn ring(&self) -> &SetRing {
        &self.ring
    }

    pub fn codomain(&self) -> &BanachSpace {
        &self.codomain
    }

    pub fn value(&self, set: &AtomSet) -> Option<&[f64]> {
        self.ring.index_of(set).map(|i| self.values[i].as_slice())
    }

    fn value_of_mask(&self, mask: u32) -> Option<&[f64]> {
        self.ring.rank_of_mask(mask).map(|i| self.values[i].as_slice())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdditivityViolation {
    pub left: AtomSet,
    pub right: AtomSet,
    /// `f(left) + f(right)`
    pub expected: Vec<f64>,
    /// `f(left ∪ right)`
    pub actual: Vec<f64>,
}

/// Every unordered disjoint pair of members whose union value is not the sum
/// of the parts. Empty iff `f` is additive.
pub fn validate_additivity(f: &RingSetFunction) -> Vec<AdditivityViolation> {
    let ring = &f.ring;
    let full = ring.full_mask();
    let mut out = Vec::new();
    for (i, &a) in ring.masks.iter().enumerate() {
        let free = full & !a;
        // all submasks of `free`, including 0
        let mut b = free;
        loop {
            if let Some(j) = ring.rank_of_mask(b) {
                if i <= j {
                    let mut expected = f.values[i].clone();
                    add_assign(&mut expected, &f.values[j]);
                    let actual = f.value_of_mask(a | b).expect("rings are closed under union");
                    let dev = expected.iter().zip(actual).fold(0.0, |m: f64, (x, y)| m.max((x - y).abs()));
                    if dev > NORM_TOL {
                        out.push(AdditivityViolation {
                            left: ring.members[i].clone(),
                            right: ring.members[j].clone(),
                            expected,
                            actual: actual.to_vec(),
                        });
                    }
                }
            }
            if b == 0 {
                break;
            }
            b = (b - 1) & free;
        }
    }
    out.sort_by(|x, y| (&x.left, &x.right).cmp(&(&y.left, &y.right)));
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignedTerm {
    /// `+1` or `-1`.
    pub sign: i8,
    pub set: AtomSet,
}

impl SignedTerm {
    pub fn plus(set: impl Into<AtomSet>) -> Self {
        SignedTerm { sign: 1, set: set.into() }
    }

    pub fn minus(set: impl Into<AtomSet>) -> Self {
        SignedTerm { sign: -1, set: set.into() }
    }
}

/// A finite signed sum of ring members `Σ α_n A_n`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SignedRepresentation {
    pub terms: Vec<SignedTerm>,
}

impl SignedRepresentation {
    pub fn new(terms: Vec<SignedTerm>) -> Self {
        SignedRepresentation { terms }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `x ↦ Σ α_n A_n(x)` over `count` atoms.
    pub fn pointwise(&self, count: usize) -> Vec<i64> {
        let mut sum = vec![0i64; count];
        for t in &self.terms {
            for a in t.set.iter().filter(|&a| a < count) {
                sum[a] += t.sign as i64;
            }
        }
        sum
    }

    /// The represented set, if the pointwise sum is an indicator.
    pub fn target(&self, count: usize) -> Option<AtomSet> {
        let sum = self.pointwise(count);
        sum.iter().all(|&s| s == 0 || s == 1).then(|| {
            sum.iter()
                .enumerate()
                .filter(|(_, &s)| s == 1)
                .map(|(a, _)| a)
                .collect()
        })
    }

    pub fn represents(&self, set: &AtomSet, count: usize) -> bool {
        self.target(count).as_ref() == Some(set)
    }

    fn check_terms(&self, ring: &SetRing) -> Result<()> {
        for t in &self.terms {
            if t.sign != 1 && t.sign != -1 {
                return Err(Error::InvalidRepresentation(format!("sign {} is not ±1", t.sign)));
            }
            if !ring.contains(&t.set) {
                return Err(Error::InvalidRepresentation(format!(
                    "term set {:?} is not a ring member",
                    t.set.indices()
                )));
            }
        }
        Ok(())
    }
}

/// Breadth-first search (by term count) for `S ≃ Σ α_n A_n` with `A_n`
/// ranging over ring members.
///
/// Any signed sum of members is constant on each cell of the ring and zero
/// off the cells, so a set that splits a cell has no representation of any
/// length; in that case `None` is returned without enumerating.
pub fn represent(set: &AtomSet, ring: &SetRing, max_terms: usize) -> Result<Option<SignedRepresentation>> {
    check_search(set, ring, max_terms)?;
    let target = mask_of(set);
    let covered = ring.cells.iter().fold(0u32, |m, c| m | c);
    let splits_cell = target & !covered != 0 || ring.cells.iter().any(|&c| c & target != 0 && c & target != c);
    if splits_cell {
        return Ok(None);
    }
    Ok(bfs_representation(target, &ring.masks, ring.ground.count(), max_terms))
}

/// As [`represent`], but terms are restricted to the ring's generators.
pub fn represent_with_generators(set: &AtomSet, ring: &SetRing, max_terms: usize) -> Result<Option<SignedRepresentation>> {
    check_search(set, ring, max_terms)?;
    let mut gens: Vec<u32> = ring.generators.iter().map(mask_of).collect();
    gens.sort_by_key(|&g| set_of(g));
    gens.dedup();
    Ok(bfs_representation(mask_of(set), &gens, ring.ground.count(), max_terms))
}

fn check_search(set: &AtomSet, ring: &SetRing, max_terms: usize) -> Result<()> {
    set.validate(&ring.ground)?;
    if max_terms > MAX_SEARCH_TERMS {
        return Err(Error::InvalidParameter(format!(
            "max_terms {max_terms} exceeds the search bound {MAX_SEARCH_TERMS}"
        )));
    }
    Ok(())
}

/// Enumerates multisets of signed alphabet terms in lexicographic order,
/// shortest first. `alphabet` must already be in member order.
pub(crate) fn bfs_representation(target: u32, alphabet: &[u32], count: usize, max_terms: usize) -> Option<SignedRepresentation> {
    // (set, sign) with `+` before `-` for each set
    let signed: Vec<(u32, i8)> = alphabet.iter().flat_map(|&m| [(m, 1), (m, -1)]).collect();
    let goal: Vec<i64> = (0..count).map(|a| (target >> a & 1) as i64).collect();
    for k in 1..=max_terms {
        let mut picked = Vec::with_capacity(k);
        let mut partial = vec![0i64; count];
        if let Some(found) = dfs(&signed, &goal, k, 0, &mut picked, &mut partial) {
            return Some(SignedRepresentation::new(
                found
                    .into_iter()
                    .map(|i| SignedTerm {
                        sign: signed[i].1,
                        set: set_of(signed[i].0),
                    })
                    .collect(),
            ));
        }
    }
    None
}

fn dfs(signed: &[(u32, i8)], goal: &[i64], k: usize, start: usize, picked: &mut Vec<usize>, partial: &mut [i64]) -> Option<Vec<usize>> {
    let remaining = (k - picked.len()) as i64;
    if goal.iter().zip(partial.iter()).any(|(g, p)| (g - p).abs() > remaining) {
        return None;
    }
    if remaining == 0 {
        return (partial == goal).then(|| picked.clone());
    }
    for i in start..signed.len() {
        let (mask, sign) = signed[i];
        // +A together with -A cancels; a shorter representation would
        // already have been found.
        let partner = if sign == 1 { i + 1 } else { i - 1 };
        if picked.contains(&partner) {
            continue;
        }
        apply(partial, mask, sign as i64);
        picked.push(i);
        let hit = dfs(signed, goal, k, i, picked, partial);
        picked.pop();
        apply(partial, mask, -(sign as i64));
        if hit.is_some() {
            return hit;
        }
    }
    None
}

fn apply(partial: &mut [i64], mask: u32, delta: i64) {
    for (a, p) in partial.iter_mut().enumerate() {
        if mask >> a & 1 == 1 {
            *p += delta;
        }
    }
}

/// `μ(S) = Σ α_n μ(A_n)` for a representation of some set `S`.
pub fn extend_set_function(f: &RingSetFunction, rep: &SignedRepresentation) -> Result<Vec<f64>> {
    rep.check_terms(&f.ring)?;
    if rep.target(f.ring.ground.count()).is_none() {
        return Err(Error::InvalidRepresentation(
            "pointwise sum is not the indicator of a set".into(),
        ));
    }
    Ok(signed_sum(f, rep))
}

fn signed_sum(f: &RingSetFunction, rep: &SignedRepresentation) -> Vec<f64> {
    let mut acc = f.codomain.zero();
    for t in &rep.terms {
        let v = f.value(&t.set).expect("terms checked against the ring");
        axpy(&mut acc, t.sign as f64, v);
    }
    acc
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmptyRepresentationCase {
    pub representation: SignedRepresentation,
    pub value: Vec<f64>,
    pub norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmptyRepresentationReport {
    pub seed: u64,
    pub requested: usize,
    pub attempts: usize,
    pub cases: Vec<EmptyRepresentationCase>,
    pub max_norm: f64,
    pub tolerance: f64,
    /// Every found representation of ∅ evaluates to the zero vector.
    pub all_zero: bool,
}

/// Randomized search for representations `∅ ≃ Σ α_n A_n` over the ring of
/// `f`, evaluating each under `f`.
///
/// Candidates come from blind sampling and from random splitting of members
/// (`+A −(A∩D) −(A∖D)`, chained, padded with cancelling pairs, shuffled);
/// every candidate passes through the same pointwise-validity filter.
pub fn empty_representation_check(f: &RingSetFunction, trials: usize, seed: u64, max_terms: usize) -> EmptyRepresentationReport {
    let ring = &f.ring;
    let count = ring.ground.count();
    let max_terms = max_terms.max(2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = Vec::with_capacity(trials);
    let mut seen = HashSet::new();
    let mut attempts = 0;
    let budget = trials.saturating_mul(2000).max(1000);

    while cases.len() < trials && attempts < budget {
        attempts += 1;
        let candidate = if rng.random_bool(0.3) {
            blind_candidate(ring, max_terms, &mut rng)
        } else {
            split_candidate(ring, max_terms, &mut rng)
        };
        if candidate.is_empty() || !candidate.represents(&AtomSet::empty(), count) {
            continue;
        }
        // prefer distinct cases while they are still easy to find
        if !seen.insert(candidate.clone()) && attempts < budget / 2 {
            continue;
        }
        let value = signed_sum(f, &candidate);
        let norm = f.codomain.norm(&value);
        cases.push(EmptyRepresentationCase {
            representation: candidate,
            value,
            norm,
        });
    }

    let max_norm = cases.iter().fold(0.0, |m: f64, c| m.max(c.norm));
    EmptyRepresentationReport {
        seed,
        requested: trials,
        attempts,
        all_zero: cases.iter().all(|c| c.norm <= EMPTY_TOL),
        cases,
        max_norm,
        tolerance: EMPTY_TOL,
    }
}

fn random_member<'a>(ring: &'a SetRing, rng: &mut impl Rng) -> &'a AtomSet {
    &ring.members[rng.random_range(0..ring.members.len())]
}

fn blind_candidate(ring: &SetRing, max_terms: usize, rng: &mut impl Rng) -> SignedRepresentation {
    let k = rng.random_range(2..=max_terms);
    SignedRepresentation::new(
        (0..k)
            .map(|_| SignedTerm {
                sign: if rng.random_bool(0.5) { 1 } else { -1 },
                set: random_member(ring, rng).clone(),
            })
            .collect(),
    )
}

fn split_candidate(ring: &SetRing, max_terms: usize, rng: &mut impl Rng) -> SignedRepresentation {
    let a = random_member(ring, rng).clone();
    let mut terms = vec![SignedTerm::plus(a.clone()), SignedTerm::minus(a)];
    // Each split replaces a term ±A by ±(A∩D) ±(A∖D); both pieces are members.
    while terms.len() < max_terms && rng.random_bool(0.7) {
        let i = rng.random_range(0..terms.len());
        if rng.random_bool(0.2) && terms.len() + 2 <= max_terms {
            let e = random_member(ring, rng).clone();
            terms.push(SignedTerm::plus(e.clone()));
            terms.push(SignedTerm::minus(e));
            continue;
        }
        let d = random_member(ring, rng);
        let t = terms.swap_remove(i);
        let inner = t.set.intersection(d);
        let outer = t.set.difference(d);
        terms.push(SignedTerm { sign: t.sign, set: inner });
        terms.push(SignedTerm { sign: t.sign, set: outer });
    }
    terms.retain(|t| !t.set.is_empty() || rng.random_bool(0.1));
    terms.shuffle(rng);
    SignedRepresentation::new(terms)
}

/// Variation of `f` on a member `A`: supremum over partitions of `A` into
/// ring members of `Σ ||f(B)||`, by enumeration over the cells inside `A`.
pub fn ring_variation(f: &RingSetFunction, set: &AtomSet) -> Result<f64> {
    let ring = &f.ring;
    let mask = ring
        .index_of(set)
        .map(|i| ring.masks[i])
        .ok_or_else(|| Error::InvalidRing(format!("{:?} is not a ring member", set.indices())))?;
    let inside: Vec<u32> = ring.cells.iter().copied().filter(|c| c & mask == *c).collect();
    if inside.len() > ORACLE_LIMIT {
        return Err(Error::TooLargeForEnumeration {
            size: inside.len(),
            limit: ORACLE_LIMIT,
        });
    }
    let mut best = 0.0f64;
    for_each_partition(inside.len(), |labels| {
        let blocks = labels.iter().max().map_or(0, |m| m + 1);
        let mut block_masks = vec![0u32; blocks];
        for (cell, &b) in inside.iter().zip(labels) {
            block_masks[b] |= cell;
        }
        let total: f64 = block_masks
            .iter()
            .map(|&b| f.codomain.norm(f.value_of_mask(b).expect("unions of cells are members")))
            .sum();
        best = best.max(total);
    });
    Ok(best)
}
