use serde::{Deserialize, Serialize};

use super::banach::{add_assign, scaled};
use super::{AtomSet, BanachSpace, MeasurableSpace, PositiveMeasure, SignedMeasure};
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
struct VectorRepr {
    space: MeasurableSpace,
    codomain: BanachSpace,
    values: Vec<Vec<f64>>,
}

/// An `E`-valued measure with `E = R^d`, stored as one vector per atom.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "VectorRepr", into = "VectorRepr")]
pub struct VectorMeasure {
    space: MeasurableSpace,
    codomain: BanachSpace,
    values: Vec<Vec<f64>>,
}

impl VectorMeasure {
    pub fn new(space: MeasurableSpace, codomain: BanachSpace, values: Vec<Vec<f64>>) -> Result<Self> {
        if values.len() != space.count() {
            return Err(Error::InvalidMeasure(format!(
                "{} vectors given for {space}",
                values.len()
            )));
        }
        for v in &values {
            codomain.check_vector(v)?;
        }
        Ok(VectorMeasure {
            space,
            codomain,
            values,
        })
    }

    pub fn zero(space: MeasurableSpace, codomain: BanachSpace) -> Self {
        let values = vec![codomain.zero(); space.count()];
        VectorMeasure {
            space,
            codomain,
            values,
        }
    }

    /// `v · mu`.
    pub fn from_product(v: &[f64], mu: &PositiveMeasure, codomain: BanachSpace) -> Result<Self> {
        codomain.check_vector(v)?;
        let values = mu.mass().iter().map(|&m| scaled(v, m)).collect();
        Ok(VectorMeasure {
            space: mu.space().clone(),
            codomain,
            values,
        })
    }

    /// One-dimensional embedding of a scalar measure.
    pub fn from_scalar(mu: &SignedMeasure) -> Self {
        VectorMeasure {
            space: mu.space().clone(),
            codomain: BanachSpace::scalar(),
            values: mu.mass().iter().map(|&m| vec![m]).collect(),
        }
    }

    pub fn space(&self) -> &MeasurableSpace {
        &self.space
    }

    pub fn codomain(&self) -> &BanachSpace {
        &self.codomain
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn value(&self, atom: usize) -> &[f64] {
        &self.values[atom]
    }

    pub fn measure_of(&self, set: &AtomSet) -> Result<Vec<f64>> {
        set.validate(&self.space)?;
        let mut acc = self.codomain.zero();
        for a in set.iter() {
            add_assign(&mut acc, &self.values[a]);
        }
        Ok(acc)
    }

    /// Total variation norm `|omega|(X) = sum_a ||omega(a)||`.
    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| self.codomain.norm(v)).sum()
    }

    fn check_same(&self, other: &VectorMeasure) -> Result<()> {
        self.space.ensure_compatible(&other.space)?;
        if self.codomain != other.codomain {
            return Err(Error::DimensionMismatch {
                expected: self.codomain.dim(),
                found: other.codomain.dim(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &VectorMeasure) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (acc, v) in out.values.iter_mut().zip(&other.values) {
            add_assign(acc, v);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &VectorMeasure) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, alpha: f64) -> Self {
        VectorMeasure {
            space: self.space.clone(),
            codomain: self.codomain,
            values: self.values.iter().map(|v| scaled(v, alpha)).collect(),
        }
    }

    /// Largest componentwise deviation over all atoms.
    pub fn max_abs_diff(&self, other: &VectorMeasure) -> Result<f64> {
        self.check_same(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .flat_map(|(u, v)| u.iter().zip(v).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max))
    }
}

impl TryFrom<VectorRepr> for VectorMeasure {
    type Error = Error;

    fn try_from(r: VectorRepr) -> Result<Self> {
        VectorMeasure::new(r.space, r.codomain, r.values)
    }
}

impl From<VectorMeasure> for VectorRepr {
    fn from(m: VectorMeasure) -> Self {
        VectorRepr {
            space: m.space,
            codomain: m.codomain,
            values: m.values,
        }
    }
}
