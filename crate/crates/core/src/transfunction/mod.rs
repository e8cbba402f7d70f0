//! Transfunctions: maps from finite positive measures on `X` to finite
//! positive measures on `Y`.

mod checks;
mod property;

pub(crate) use property::{sweep, Cone};

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{MeasurableSpace, PositiveMeasure, SignedMeasure, NORM_TOL};

pub use checks::{
    additivity_deviation, bound_excess, difference_deviation, growth_diverges, growth_ratios, homogeneity_deviation, monotone_deviation,
    norm_deviation, probe_converges, probe_residuals, replay, Eval, ProbeMode, Verdict, Witness, GROWTH_FACTOR, GROWTH_SCALES,
    PROBE_LEN, PROBE_TOL,
};
pub use property::{check_all, check_property, operator_norm, NormMethod, OperatorNorm, PropertyEntry, PropertyReport, SamplerConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    WeaklyAdditive,
    StronglyAdditive,
    Homogeneous,
    Monotone,
    NormPreserving,
    Bounded,
    SetwiseContinuous,
    UniformlyContinuous,
}

impl Property {
    pub const ALL: [Property; 8] = [
        Property::WeaklyAdditive,
        Property::StronglyAdditive,
        Property::Homogeneous,
        Property::Monotone,
        Property::NormPreserving,
        Property::Bounded,
        Property::SetwiseContinuous,
        Property::UniformlyContinuous,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::WeaklyAdditive => "weakly_additive",
            Property::StronglyAdditive => "strongly_additive",
            Property::Homogeneous => "homogeneous",
            Property::Monotone => "monotone",
            Property::NormPreserving => "norm_preserving",
            Property::Bounded => "bounded",
            Property::SetwiseContinuous => "setwise_continuous",
            Property::UniformlyContinuous => "uniformly_continuous",
        }
    }

    pub(crate) fn tag(self) -> u64 {
        Property::ALL.iter().position(|&p| p == self).expect("listed") as u64
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Property {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Property::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::UnknownProperty(s.to_owned()))
    }
}

/// How a transfunction acts on a measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Rule {
    /// `Φ_f(μ)(B) = μ(f⁻¹(B))`; `map[a]` is the image of atom `a`.
    Pushforward { map: Vec<usize> },
    /// `Φ(μ)(b) = Σ_a μ(a) K[a][b]` with `K` nonnegative.
    Kernel { matrix: Vec<Vec<f64>> },
    /// `Φ(μ) = μ(X) · uniform(Y)`.
    UniformSpread,
    /// `Φ(μ) = μ(X)² · uniform(Y)`; neither additive nor homogeneous.
    SquareMassSpread,
    /// `Φ(μ) = min(μ(X), 1) · uniform(Y)`; monotone and bounded only.
    ClampSpread,
}

impl Rule {
    pub fn type_name(&self) -> &'static str {
        match self {
            Rule::Pushforward { .. } => "pushforward",
            Rule::Kernel { .. } => "kernel",
            Rule::UniformSpread => "uniform_spread",
            Rule::SquareMassSpread => "square_mass_spread",
            Rule::ClampSpread => "clamp_spread",
        }
    }

    /// Rules that are linear on the positive cone, for which `‖Φ‖` is
    /// `max_a ‖Φ δ_a‖`.
    pub fn is_linear(&self) -> bool {
        matches!(self, Rule::Pushforward { .. } | Rule::Kernel { .. } | Rule::UniformSpread)
    }
}

#[derive(Serialize, Deserialize)]
struct TransfunctionRepr {
    domain: MeasurableSpace,
    codomain: MeasurableSpace,
    rule: Rule,
    #[serde(default)]
    declared: BTreeSet<Property>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TransfunctionRepr", into = "TransfunctionRepr")]
pub struct Transfunction {
    domain: MeasurableSpace,
    codomain: MeasurableSpace,
    rule: Rule,
    declared: BTreeSet<Property>,
}

impl Transfunction {
    pub fn new(domain: MeasurableSpace, codomain: MeasurableSpace, rule: Rule) -> Result<Self> {
        match &rule {
            Rule::Pushforward { map } => {
                if map.len() != domain.count() {
                    return Err(Error::InvalidTransfunction(format!(
                        "map has {} entries for {} domain atoms",
                        map.len(),
                        domain.count()
                    )));
                }
                if let Some((a, &b)) = map.iter().enumerate().find(|(_, &b)| b >= codomain.count()) {
                    return Err(Error::InvalidTransfunction(format!(
                        "atom {a} maps to {b}, outside {codomain}"
                    )));
                }
            }
            Rule::Kernel { matrix } => {
                if matrix.len() != domain.count() {
                    return Err(Error::InvalidTransfunction(format!(
                        "kernel has {} rows for {} domain atoms",
                        matrix.len(),
                        domain.count()
                    )));
                }
                for (a, row) in matrix.iter().enumerate() {
                    if row.len() != codomain.count() {
                        return Err(Error::InvalidTransfunction(format!(
                            "kernel row {a} has {} entries for {} codomain atoms",
                            row.len(),
                            codomain.count()
                        )));
                    }
                    if row.iter().any(|&k| !k.is_finite() || k < 0.0) {
                        return Err(Error::InvalidTransfunction(format!(
                            "kernel row {a} has a negative or non-finite entry"
                        )));
                    }
                }
            }
            Rule::UniformSpread | Rule::SquareMassSpread | Rule::ClampSpread => {}
        }
        Ok(Transfunction {
            domain,
            codomain,
            rule,
            declared: BTreeSet::new(),
        })
    }

    pub fn pushforward(domain: MeasurableSpace, codomain: MeasurableSpace, map: Vec<usize>) -> Result<Self> {
        Self::new(domain, codomain, Rule::Pushforward { map })
    }

    pub fn kernel(domain: MeasurableSpace, codomain: MeasurableSpace, matrix: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(domain, codomain, Rule::Kernel { matrix })
    }

    pub fn uniform_spread(domain: MeasurableSpace, codomain: MeasurableSpace) -> Self {
        Self::new(domain, codomain, Rule::UniformSpread).expect("no parameters to validate")
    }

    pub fn with_declared(mut self, declared: impl IntoIterator<Item = Property>) -> Self {
        self.declared = declared.into_iter().collect();
        self
    }

    pub fn domain(&self) -> &MeasurableSpace {
        &self.domain
    }

    pub fn codomain(&self) -> &MeasurableSpace {
        &self.codomain
    }

    pub fn rule(&self) -> &Rule {
        &self.rule
    }

    pub fn declared(&self) -> &BTreeSet<Property> {
        &self.declared
    }

    pub fn apply(&self, mu: &PositiveMeasure) -> Result<PositiveMeasure> {
        self.domain.ensure_compatible(mu.space())?;
        let k = self.codomain.count();
        let mass = match &self.rule {
            Rule::Pushforward { map } => {
                let mut out = vec![0.0; k];
                for (&m, &b) in mu.mass().iter().zip(map) {
                    out[b] += m;
                }
                out
            }
            Rule::Kernel { matrix } => {
                let mut out = vec![0.0; k];
                for (&m, row) in mu.mass().iter().zip(matrix) {
                    for (o, &w) in out.iter_mut().zip(row) {
                        *o += m * w;
                    }
                }
                out
            }
            Rule::UniformSpread => spread(mu.total(), k),
            Rule::SquareMassSpread => spread(mu.total().powi(2), k),
            Rule::ClampSpread => spread(mu.total().min(1.0), k),
        };
        PositiveMeasure::new(self.codomain.clone(), mass)
    }

    /// Applies to a signed measure that must be nonnegative.
    pub(crate) fn apply_signed(&self, mu: &SignedMeasure) -> Result<SignedMeasure> {
        Ok(self.apply(&mu.to_positive()?)?.to_signed())
    }

    /// What is known in closed form about `property` for this rule, if
    /// anything.
    pub fn structural(&self, property: Property) -> Option<bool> {
        use Property::*;
        match &self.rule {
            Rule::Pushforward { .. } | Rule::UniformSpread => Some(true),
            Rule::Kernel { matrix } => Some(match property {
                NormPreserving => matrix
                    .iter()
                    .all(|row| (row.iter().sum::<f64>() - 1.0).abs() <= NORM_TOL),
                _ => true,
            }),
            Rule::SquareMassSpread | Rule::ClampSpread => Some(match property {
                // singular pairs with both parts nonzero need two atoms
                WeaklyAdditive => self.domain.count() < 2,
                StronglyAdditive | Homogeneous | NormPreserving => false,
                Monotone | SetwiseContinuous | UniformlyContinuous => true,
                Bounded => matches!(self.rule, Rule::ClampSpread),
            }),
        }
    }

    /// An atom map `f` with `Φ = Φ_f`, found by enumerating all maps
    /// `X → Y` (at most `limit` of them). Only meaningful for linear rules,
    /// where agreement on Dirac masses is agreement everywhere.
    pub fn find_pushforward_equivalent(&self, limit: u64) -> Result<Option<Vec<usize>>> {
        let (m, k) = (self.domain.count(), self.codomain.count());
        let total = (k as u64).checked_pow(m as u32).filter(|&t| t <= limit);
        let Some(total) = total else {
            return Err(Error::TooLargeForEnumeration {
                size: m,
                limit: limit as usize,
            });
        };
        let images: Vec<Vec<f64>> = (0..m)
            .map(|a| {
                let d = PositiveMeasure::dirac(self.domain.clone(), a)?;
                Ok(self.apply(&d)?.into_mass())
            })
            .collect::<Result<_>>()?;
        for code in 0..total {
            let mut c = code;
            let f: Vec<usize> = (0..m)
                .map(|_| {
                    let b = (c % k as u64) as usize;
                    c /= k as u64;
                    b
                })
                .collect();
            let matches = images.iter().zip(&f).all(|(img, &b)| {
                img.iter()
                    .enumerate()
                    .all(|(j, &x)| (x - if j == b { 1.0 } else { 0.0 }).abs() <= NORM_TOL)
            });
            if matches {
                return Ok(Some(f));
            }
        }
        Ok(None)
    }
}

fn spread(total: f64, k: usize) -> Vec<f64> {
    vec![total / k as f64; k]
}

impl TryFrom<TransfunctionRepr> for Transfunction {
    type Error = Error;

    fn try_from(r: TransfunctionRepr) -> Result<Self> {
        Ok(Transfunction::new(r.domain, r.codomain, r.rule)?.with_declared(r.declared))
    }
}

impl From<Transfunction> for TransfunctionRepr {
    fn from(t: Transfunction) -> Self {
        TransfunctionRepr {
            domain: t.domain,
            codomain: t.codomain,
            rule: t.rule,
            declared: t.declared,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atomic(n: usize) -> MeasurableSpace {
        MeasurableSpace::atomic(n).unwrap()
    }

    fn pos(mass: &[f64]) -> PositiveMeasure {
        PositiveMeasure::new(atomic(mass.len()), mass.to_vec()).unwrap()
    }

    #[test]
    fn pushforward_sums_preimages() {
        let phi = Transfunction::pushforward(atomic(3), atomic(2), vec![0, 0, 1]).unwrap();
        assert_eq!(phi.apply(&pos(&[1.0, 2.0, 3.0])).unwrap().mass(), &[3.0, 3.0]);
    }

    #[test]
    fn uniform_spread_on_grid() {
        let phi = Transfunction::uniform_spread(atomic(2), MeasurableSpace::grid(4).unwrap());
        assert_eq!(phi.apply(&pos(&[0.25, 0.75])).unwrap().mass(), &[0.25; 4]);
    }

    #[test]
    fn kernel_mixes_rows() {
        let phi = Transfunction::kernel(atomic(2), atomic(2), vec![vec![0.5, 0.5], vec![0.0, 1.0]]).unwrap();
        assert_eq!(phi.apply(&pos(&[2.0, 4.0])).unwrap().mass(), &[1.0, 5.0]);
    }

    #[test]
    fn negative_controls() {
        let y = atomic(2);
        let sq = Transfunction::new(atomic(1), y.clone(), Rule::SquareMassSpread).unwrap();
        assert_eq!(sq.apply(&pos(&[3.0])).unwrap().mass(), &[4.5, 4.5]);
        let cl = Transfunction::new(atomic(1), y, Rule::ClampSpread).unwrap();
        assert_eq!(cl.apply(&pos(&[3.0])).unwrap().mass(), &[0.5, 0.5]);
        assert_eq!(cl.apply(&pos(&[0.5])).unwrap().mass(), &[0.25, 0.25]);
    }

    #[test]
    fn validation() {
        assert!(Transfunction::pushforward(atomic(2), atomic(2), vec![0, 2]).is_err());
        assert!(Transfunction::pushforward(atomic(2), atomic(2), vec![0]).is_err());
        assert!(Transfunction::kernel(atomic(1), atomic(2), vec![vec![1.0, -0.1]]).is_err());
        assert!(Transfunction::kernel(atomic(1), atomic(2), vec![vec![1.0]]).is_err());
        let phi = Transfunction::uniform_spread(atomic(2), atomic(2));
        assert!(phi.apply(&pos(&[1.0, 1.0, 1.0])).is_err());
    }

    #[test]
    fn property_names_round_trip() {
        for p in Property::ALL {
            assert_eq!(p.name().parse::<Property>().unwrap(), p);
        }
        assert!(matches!("linear".parse::<Property>(), Err(Error::UnknownProperty(_))));
    }

    #[test]
    fn uniform_spread_is_not_a_pushforward() {
        for (m, k) in [(1, 2), (2, 2), (3, 3), (4, 2), (2, 4)] {
            let phi = Transfunction::uniform_spread(atomic(m), atomic(k));
            assert_eq!(phi.find_pushforward_equivalent(1 << 16).unwrap(), None, "{m}->{k}");
        }
        // with a single output atom it is the constant map
        let phi = Transfunction::uniform_spread(atomic(3), atomic(1));
        assert_eq!(phi.find_pushforward_equivalent(16).unwrap(), Some(vec![0, 0, 0]));
        let phi = Transfunction::kernel(atomic(2), atomic(2), vec![vec![0.0, 1.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(phi.find_pushforward_equivalent(16).unwrap(), Some(vec![1, 1]));
    }

    #[test]
    fn serde_round_trip() {
        let phi = Transfunction::kernel(atomic(2), atomic(1), vec![vec![1.0], vec![0.5]])
            .unwrap()
            .with_declared([Property::Bounded, Property::Monotone]);
        let json = serde_json::to_string(&phi).unwrap();
        assert!(json.contains(r#""type":"kernel""#));
        assert_eq!(serde_json::from_str::<Transfunction>(&json).unwrap(), phi);
    }
}
