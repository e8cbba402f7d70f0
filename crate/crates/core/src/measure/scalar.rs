use serde::{Deserialize, Serialize};

use super::{AtomSet, MeasurableSpace, SUPPORT_TOL};
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
struct ScalarRepr {
    space: MeasurableSpace,
    mass: Vec<f64>,
}

fn check_masses(space: &MeasurableSpace, mass: &[f64]) -> Result<()> {
    if mass.len() != space.count() {
        return Err(Error::InvalidMeasure(format!(
            "{} masses given for {space}",
            mass.len()
        )));
    }
    if let Some(i) = mass.iter().position(|m| !m.is_finite()) {
        return Err(Error::InvalidMeasure(format!("mass of atom {i} is not finite")));
    }
    Ok(())
}

fn sum_over(space: &MeasurableSpace, mass: &[f64], set: &AtomSet) -> Result<f64> {
    set.validate(space)?;
    Ok(set.iter().map(|a| mass[a]).sum())
}

/// A finite nonnegative measure, stored as mass per atom.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScalarRepr", into = "ScalarRepr")]
pub struct PositiveMeasure {
    space: MeasurableSpace,
    mass: Vec<f64>,
}

impl PositiveMeasure {
    pub fn new(space: MeasurableSpace, mass: Vec<f64>) -> Result<Self> {
        check_masses(&space, &mass)?;
        if let Some(i) = mass.iter().position(|&m| m < 0.0) {
            return Err(Error::InvalidMeasure(format!(
                "mass of atom {i} is negative ({})",
                mass[i]
            )));
        }
        Ok(PositiveMeasure { space, mass })
    }

    /// Grid ingestion: `density[k]` is the density on cell `k`, stored as
    /// `density[k] / N`.
    pub fn from_density(space: MeasurableSpace, density: &[f64]) -> Result<Self> {
        let width = space
            .cell_width()
            .ok_or_else(|| Error::InvalidMeasure("densities are only defined on grid spaces".into()))?;
        Self::new(space, density.iter().map(|d| d * width).collect())
    }

    pub fn zero(space: MeasurableSpace) -> Self {
        let mass = vec![0.0; space.count()];
        PositiveMeasure { space, mass }
    }

    pub fn dirac(space: MeasurableSpace, atom: usize) -> Result<Self> {
        space.check_atom(atom)?;
        let mut m = Self::zero(space);
        m.mass[atom] = 1.0;
        Ok(m)
    }

    /// Total mass one, spread evenly; on a grid this is Lebesgue measure.
    pub fn uniform(space: MeasurableSpace) -> Self {
        let w = 1.0 / space.count() as f64;
        let mass = vec![w; space.count()];
        PositiveMeasure { space, mass }
    }

    pub fn space(&self) -> &MeasurableSpace {
        &self.space
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn into_mass(self) -> Vec<f64> {
        self.mass
    }

    pub fn measure_of(&self, set: &AtomSet) -> Result<f64> {
        sum_over(&self.space, &self.mass, set)
    }

    /// `mu(X)`, which is also the total variation norm.
    pub fn total(&self) -> f64 {
        self.mass.iter().sum()
    }

    pub fn norm(&self) -> f64 {
        self.total()
    }

    /// `mu_A(S) = mu(S ∩ A)`.
    pub fn restrict(&self, set: &AtomSet) -> Result<Self> {
        set.validate(&self.space)?;
        let mut out = Self::zero(self.space.clone());
        for a in set.iter() {
            out.mass[a] = self.mass[a];
        }
        Ok(out)
    }

    pub fn add(&self, other: &PositiveMeasure) -> Result<Self> {
        self.space.ensure_compatible(&other.space)?;
        let mass = self.mass.iter().zip(&other.mass).map(|(a, b)| a + b).collect();
        Ok(PositiveMeasure {
            space: self.space.clone(),
            mass,
        })
    }

    pub fn scale(&self, alpha: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::InvalidParameter(format!("scale factor {alpha} is not finite")));
        }
        if alpha < 0.0 {
            return Err(Error::NegativeScaling(alpha));
        }
        Ok(PositiveMeasure {
            space: self.space.clone(),
            mass: self.mass.iter().map(|m| alpha * m).collect(),
        })
    }

    pub fn to_signed(&self) -> SignedMeasure {
        SignedMeasure {
            space: self.space.clone(),
            mass: self.mass.clone(),
        }
    }

    /// `self - other` as a signed measure.
    pub fn difference(&self, other: &PositiveMeasure) -> Result<SignedMeasure> {
        self.to_signed().sub(&other.to_signed())
    }

    /// Atoms carrying mass strictly above `tol`.
    pub fn support(&self, tol: f64) -> AtomSet {
        self.mass
            .iter()
            .enumerate()
            .filter(|(_, &m)| m > tol)
            .map(|(a, _)| a)
            .collect()
    }

    /// Atomwise `self <= other + tol`.
    pub fn is_dominated_by(&self, other: &PositiveMeasure, tol: f64) -> Result<bool> {
        self.space.ensure_compatible(&other.space)?;
        Ok(self.mass.iter().zip(&other.mass).all(|(a, b)| *a <= b + tol))
    }
}

/// `mu1 ⊥ mu2`: supports above [`SUPPORT_TOL`] are disjoint.
pub fn mutually_singular(a: &PositiveMeasure, b: &PositiveMeasure) -> Result<bool> {
    mutually_singular_with(a, b, SUPPORT_TOL)
}

pub fn mutually_singular_with(a: &PositiveMeasure, b: &PositiveMeasure, tol: f64) -> Result<bool> {
    a.space.ensure_compatible(&b.space)?;
    Ok(a.mass.iter().zip(&b.mass).all(|(x, y)| *x <= tol || *y <= tol))
}

impl TryFrom<ScalarRepr> for PositiveMeasure {
    type Error = Error;

    fn try_from(r: ScalarRepr) -> Result<Self> {
        PositiveMeasure::new(r.space, r.mass)
    }
}

impl From<PositiveMeasure> for ScalarRepr {
    fn from(m: PositiveMeasure) -> Self {
        ScalarRepr {
            space: m.space,
            mass: m.mass,
        }
    }
}

/// A finite signed measure of bounded variation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScalarRepr", into = "ScalarRepr")]
pub struct SignedMeasure {
    space: MeasurableSpace,
    mass: Vec<f64>,
}

impl SignedMeasure {
    pub fn new(space: MeasurableSpace, mass: Vec<f64>) -> Result<Self> {
        check_masses(&space, &mass)?;
        Ok(SignedMeasure { space, mass })
    }

    pub fn zero(space: MeasurableSpace) -> Self {
        let mass = vec![0.0; space.count()];
        SignedMeasure { space, mass }
    }

    pub fn space(&self) -> &MeasurableSpace {
        &self.space
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn measure_of(&self, set: &AtomSet) -> Result<f64> {
        sum_over(&self.space, &self.mass, set)
    }

    /// Total variation norm `sum |mass(a)|`.
    pub fn norm(&self) -> f64 {
        self.mass.iter().map(|m| m.abs()).sum()
    }

    /// `sup_B |mu(B)| = max(mu+(X), mu-(X))`.
    pub fn sup_set_value(&self) -> f64 {
        let (pos, neg) = self.mass.iter().fold((0.0, 0.0), |(p, n), &m| {
            if m > 0.0 {
                (p + m, n)
            } else {
                (p, n - m)
            }
        });
        f64::max(pos, neg)
    }

    pub fn add(&self, other: &SignedMeasure) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &SignedMeasure) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, alpha: f64) -> Self {
        SignedMeasure {
            space: self.space.clone(),
            mass: self.mass.iter().map(|m| alpha * m).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(-1.0)
    }

    fn zip_with(&self, other: &SignedMeasure, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.space.ensure_compatible(&other.space)?;
        Ok(SignedMeasure {
            space: self.space.clone(),
            mass: self.mass.iter().zip(&other.mass).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    /// Jordan decomposition: the mutually singular pair `(mu+, mu-)` with
    /// `mu = mu+ - mu-`.
    pub fn jordan(&self) -> (PositiveMeasure, PositiveMeasure) {
        let pos = self.mass.iter().map(|&m| m.max(0.0)).collect();
        let neg = self.mass.iter().map(|&m| (-m).max(0.0)).collect();
        (
            PositiveMeasure {
                space: self.space.clone(),
                mass: pos,
            },
            PositiveMeasure {
                space: self.space.clone(),
                mass: neg,
            },
        )
    }

    /// Succeeds only if no atom is negative.
    pub fn to_positive(&self) -> Result<PositiveMeasure> {
        PositiveMeasure::new(self.space.clone(), self.mass.clone())
    }

    pub fn is_nonnegative(&self) -> bool {
        self.mass.iter().all(|&m| m >= 0.0)
    }

    /// Atomwise `|self - other| <= tol`.
    pub fn approx_eq(&self, other: &SignedMeasure, tol: f64) -> bool {
        self.max_abs_diff(other).is_some_and(|d| d <= tol)
    }

    /// Largest atomwise deviation, or `None` on a space mismatch.
    pub fn max_abs_diff(&self, other: &SignedMeasure) -> Option<f64> {
        self.space.is_compatible(&other.space).then(|| {
            self.mass
                .iter()
                .zip(&other.mass)
                .fold(0.0, |m, (a, b)| f64::max(m, (a - b).abs()))
        })
    }
}

pub fn jordan_decompose(mu: &SignedMeasure) -> (PositiveMeasure, PositiveMeasure) {
    mu.jordan()
}

impl From<&PositiveMeasure> for SignedMeasure {
    fn from(m: &PositiveMeasure) -> Self {
        m.to_signed()
    }
}

impl TryFrom<ScalarRepr> for SignedMeasure {
    type Error = Error;

    fn try_from(r: ScalarRepr) -> Result<Self> {
        SignedMeasure::new(r.space, r.mass)
    }
}

impl From<SignedMeasure> for ScalarRepr {
    fn from(m: SignedMeasure) -> Self {
        ScalarRepr {
            space: m.space,
            mass: m.mass,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn atomic(n: usize) -> MeasurableSpace {
        MeasurableSpace::atomic(n).unwrap()
    }

    fn pos(mass: &[f64]) -> PositiveMeasure {
        PositiveMeasure::new(atomic(mass.len()), mass.to_vec()).unwrap()
    }

    fn signed(mass: &[f64]) -> SignedMeasure {
        SignedMeasure::new(atomic(mass.len()), mass.to_vec()).unwrap()
    }

    #[test]
    fn measure_of_sums_atoms() {
        let mu = pos(&[1.0, 2.0, 3.0]);
        assert_eq!(mu.measure_of(&AtomSet::from([0, 2])).unwrap(), 4.0);
        assert_eq!(mu.measure_of(&AtomSet::empty()).unwrap(), 0.0);
        assert!(matches!(
            mu.measure_of(&AtomSet::from([3])),
            Err(Error::AtomOutOfRange { index: 3, count: 3 })
        ));
    }

    #[test]
    fn rejects_negative_and_nan() {
        assert!(PositiveMeasure::new(atomic(2), vec![1.0, -0.5]).is_err());
        assert!(SignedMeasure::new(atomic(2), vec![1.0, f64::NAN]).is_err());
        assert!(SignedMeasure::new(atomic(2), vec![1.0]).is_err());
    }

    #[test]
    fn density_ingestion() {
        let g = MeasurableSpace::grid(4).unwrap();
        let mu = PositiveMeasure::from_density(g, &[1.0, 2.0, 0.0, 4.0]).unwrap();
        assert_eq!(mu.mass(), &[0.25, 0.5, 0.0, 1.0]);
        assert!(PositiveMeasure::from_density(atomic(2), &[1.0, 1.0]).is_err());
    }

    #[test]
    fn arithmetic() {
        assert_eq!(pos(&[1.0, 2.0]).add(&pos(&[3.0, 4.0])).unwrap(), pos(&[4.0, 6.0]));
        assert_eq!(pos(&[2.0, 4.0]).scale(0.5).unwrap(), pos(&[1.0, 2.0]));
        assert!(matches!(pos(&[1.0]).scale(-1.0), Err(Error::NegativeScaling(_))));
        assert!(pos(&[1.0]).add(&pos(&[1.0, 2.0])).is_err());
        assert_eq!(pos(&[1.0]).to_signed().scale(-2.0), signed(&[-2.0]));
        // disjoint supports: norms add
        let (a, b) = (pos(&[1.0, 0.0]), pos(&[0.0, 2.0]));
        assert_eq!(a.add(&b).unwrap().norm(), a.norm() + b.norm());
        assert_eq!(a.add(&b).unwrap().norm(), 3.0);
    }

    #[test]
    fn singularity() {
        assert!(mutually_singular(&pos(&[1.0, 0.0, 0.0]), &pos(&[0.0, 0.0, 2.0])).unwrap());
        assert!(!mutually_singular(&pos(&[1.0, 1.0, 0.0]), &pos(&[0.0, 1.0, 1.0])).unwrap());
        // 1e-15 is below the support threshold, so atom 0 is outside supp(mu1).
        assert!(mutually_singular(&pos(&[1e-15, 1.0, 0.0]), &pos(&[1.0, 0.0, 0.0])).unwrap());
        assert!(!mutually_singular_with(&pos(&[1e-15, 1.0, 0.0]), &pos(&[1.0, 0.0, 0.0]), 0.0).unwrap());
    }

    #[test]
    fn jordan_examples() {
        let (p, n) = signed(&[2.0, -3.0]).jordan();
        assert_eq!(p, pos(&[2.0, 0.0]));
        assert_eq!(n, pos(&[0.0, 3.0]));
        let (p, n) = signed(&[0.0, 0.0]).jordan();
        assert_eq!(p.total(), 0.0);
        assert_eq!(n.total(), 0.0);
    }

    #[test]
    fn jordan_parts_are_minimal() {
        // Oracle: random decompositions mu = nu1 - nu2 with nu1, nu2 >= 0.
        let mu = signed(&[1.5, 2.5, -4.0]);
        let (p, n) = mu.jordan();
        assert_eq!(mu.norm(), 8.0);
        assert_eq!(p.norm() + n.norm(), 8.0);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut found = 0;
        while found < 500 {
            let nu2: Vec<f64> = (0..3).map(|_| rng.random_range(0.0..6.0)).collect();
            let nu1: Vec<f64> = mu.mass().iter().zip(&nu2).map(|(m, b)| m + b).collect();
            if nu1.iter().any(|&x| x < 0.0) {
                continue;
            }
            found += 1;
            for (a, b) in nu1.iter().zip(p.mass()) {
                assert!(a + 1e-12 >= *b);
            }
        }
    }

    #[test]
    fn sup_set_value_matches_enumeration() {
        let mu = signed(&[1.0, -2.5, 0.75, -0.25]);
        let brute = (0u64..16)
            .map(|m| mu.measure_of(&AtomSet::from_mask(m)).unwrap().abs())
            .fold(0.0, f64::max);
        assert_eq!(mu.sup_set_value(), brute);
    }
}
