//! Series representations `ω = Σ v_n μ_n` of vector measures and the
//! extension `Φ̃(Σ v_n μ_n) = Σ v_n Φμ_n`.

use serde::{Deserialize, Serialize};

use super::partition::lemma1_partition;
use crate::error::{Error, Result};
use crate::measure::{add_assign, axpy, total_variation, BanachSpace, MeasurableSpace, PositiveMeasure, VectorMeasure, NORM_TOL};
use crate::transfunction::{check_property, operator_norm, OperatorNorm, Property, PropertyEntry, SamplerConfig, Transfunction};

pub const DEFAULT_GROUPING_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesTerm {
    pub vector: Vec<f64>,
    pub measure: PositiveMeasure,
}

#[derive(Serialize, Deserialize)]
struct SeriesRepr {
    space: MeasurableSpace,
    codomain: BanachSpace,
    terms: Vec<SeriesTerm>,
}

/// A finite sum `Σ v_n μ_n` with `v_n ∈ E` and `μ_n` positive, all on one
/// space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SeriesRepr", into = "SeriesRepr")]
pub struct SeriesRepresentation {
    space: MeasurableSpace,
    codomain: BanachSpace,
    terms: Vec<SeriesTerm>,
}

impl SeriesRepresentation {
    pub fn new(space: MeasurableSpace, codomain: BanachSpace, terms: Vec<SeriesTerm>) -> Result<Self> {
        for t in &terms {
            codomain.check_vector(&t.vector)?;
            space.ensure_compatible(t.measure.space())?;
        }
        Ok(SeriesRepresentation { space, codomain, terms })
    }

    pub fn single(vector: Vec<f64>, measure: PositiveMeasure, codomain: BanachSpace) -> Result<Self> {
        Self::new(measure.space().clone(), codomain, vec![SeriesTerm { vector, measure }])
    }

    pub fn space(&self) -> &MeasurableSpace {
        &self.space
    }

    pub fn codomain(&self) -> &BanachSpace {
        &self.codomain
    }

    pub fn terms(&self) -> &[SeriesTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Σ ‖v_n‖ ‖μ_n‖`, finite for every finite series.
    pub fn weight(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| self.codomain.norm(&t.vector) * t.measure.norm())
            .sum()
    }

    /// The vector measure `A ↦ Σ v_n μ_n(A)`.
    pub fn evaluate(&self) -> VectorMeasure {
        let mut values = vec![self.codomain.zero(); self.space.count()];
        for t in &self.terms {
            for (acc, &m) in values.iter_mut().zip(t.measure.mass()) {
                axpy(acc, m, &t.vector);
            }
        }
        VectorMeasure::new(self.space.clone(), self.codomain, values).expect("finite by construction")
    }

    /// Term list concatenation, representing the sum of the two measures.
    pub fn concat(&self, other: &SeriesRepresentation) -> Result<Self> {
        self.space.ensure_compatible(&other.space)?;
        if self.codomain != other.codomain {
            return Err(Error::DimensionMismatch {
                expected: self.codomain.dim(),
                found: other.codomain.dim(),
            });
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(SeriesRepresentation { terms, ..self.clone() })
    }

    /// Scales every vector by `c`, which may be negative.
    pub fn scale(&self, c: f64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| SeriesTerm {
                vector: t.vector.iter().map(|x| c * x).collect(),
                measure: t.measure.clone(),
            })
            .collect();
        SeriesRepresentation { terms, ..self.clone() }
    }
}

impl TryFrom<SeriesRepr> for SeriesRepresentation {
    type Error = Error;

    fn try_from(r: SeriesRepr) -> Result<Self> {
        SeriesRepresentation::new(r.space, r.codomain, r.terms)
    }
}

impl From<SeriesRepresentation> for SeriesRepr {
    fn from(s: SeriesRepresentation) -> Self {
        SeriesRepr {
            space: s.space,
            codomain: s.codomain,
            terms: s.terms,
        }
    }
}

/// Writes `ω = Σ v_n μ_n` with `μ_n = |ω|` restricted to the atoms whose
/// derivative `ω(a) / |ω|(a)` lies within `tol` (sup distance) of the first
/// atom of group `n`. `v_n` is the group's mean derivative, renormalized.
pub fn series_decompose(omega: &VectorMeasure, tol: f64) -> Result<SeriesRepresentation> {
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(Error::InvalidParameter(format!("grouping tolerance {tol} must be nonnegative")));
    }
    let codomain = *omega.codomain();
    let variation = total_variation(omega);
    let mut groups: Vec<(Vec<f64>, Vec<usize>)> = Vec::new();
    for (a, &w) in variation.mass().iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let derivative: Vec<f64> = omega.value(a).iter().map(|x| x / w).collect();
        let close = |anchor: &[f64]| {
            anchor
                .iter()
                .zip(&derivative)
                .all(|(p, q)| (p - q).abs() <= tol)
        };
        match groups.iter_mut().find(|(anchor, _)| close(anchor)) {
            Some((_, members)) => members.push(a),
            None => groups.push((derivative, vec![a])),
        }
    }
    let terms = groups
        .into_iter()
        .map(|(anchor, members)| {
            let vector = if members.len() == 1 {
                anchor
            } else {
                let mut centroid = codomain.zero();
                for &a in &members {
                    axpy(&mut centroid, 1.0 / variation.mass()[a], omega.value(a));
                }
                let length = codomain.norm(&centroid);
                centroid.iter().map(|x| x / length).collect()
            };
            let set = members.into_iter().collect();
            Ok(SeriesTerm {
                vector,
                measure: variation.restrict(&set)?,
            })
        })
        .collect::<Result<_>>()?;
    SeriesRepresentation::new(omega.space().clone(), codomain, terms)
}

/// `Φ̃(Σ v_n μ_n) = Σ v_n Φμ_n` for a bounded, strongly additive and
/// homogeneous `Φ`, which is checked once at construction.
#[derive(Debug, Clone)]
pub struct VectorExtension {
    phi: Transfunction,
    norm: OperatorNorm,
    hypotheses: Vec<PropertyEntry>,
}

impl VectorExtension {
    pub const HYPOTHESES: [Property; 3] = [Property::Bounded, Property::StronglyAdditive, Property::Homogeneous];

    pub fn new(phi: Transfunction, config: &SamplerConfig) -> Result<Self> {
        let mut hypotheses = Vec::with_capacity(3);
        for property in Self::HYPOTHESES {
            let entry = check_property(&phi, property, config)?;
            if entry.structural == Some(false) || !entry.verdict.holds() {
                let detail = match &entry.verdict {
                    crate::transfunction::Verdict::Violated { deviation, trial, .. } => {
                        format!("violated on trial {trial} with deviation {deviation}")
                    }
                    _ => "fails structurally".to_owned(),
                };
                return Err(Error::HypothesisFailed {
                    property: property.name().to_owned(),
                    detail,
                });
            }
            hypotheses.push(entry);
        }
        let norm = operator_norm(&phi, config)?;
        Ok(VectorExtension { phi, norm, hypotheses })
    }

    pub fn transfunction(&self) -> &Transfunction {
        &self.phi
    }

    pub fn operator_norm(&self) -> OperatorNorm {
        self.norm
    }

    pub fn hypotheses(&self) -> &[PropertyEntry] {
        &self.hypotheses
    }

    pub fn extend(&self, rep: &SeriesRepresentation) -> Result<VectorMeasure> {
        self.phi.domain().ensure_compatible(rep.space())?;
        let codomain = *rep.codomain();
        let mut values = vec![codomain.zero(); self.phi.codomain().count()];
        for t in rep.terms() {
            let image = self.phi.apply(&t.measure)?;
            for (acc, &m) in values.iter_mut().zip(image.mass()) {
                axpy(acc, m, &t.vector);
            }
        }
        VectorMeasure::new(self.phi.codomain().clone(), codomain, values)
    }
}

pub fn extend_vector(phi: &Transfunction, rep: &SeriesRepresentation, config: &SamplerConfig) -> Result<VectorMeasure> {
    VectorExtension::new(phi.clone(), config)?.extend(rep)
}

/// The quantities in the proof that `‖Σ v_i Φμ_i‖ <= ‖Φ‖ ‖Σ v_i μ_i‖`,
/// evaluated on one family through a partition approximation with
/// remainders small enough for both `ε/2` estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCertificate {
    pub epsilon: f64,
    /// `ε / (2 max(1, Σ‖v_i‖) max(1, ‖Φ‖))`, handed to the partition step.
    pub partition_epsilon: f64,
    pub operator_norm: f64,
    /// `‖Σ v_i Φμ_i‖`
    pub image_norm: f64,
    /// `‖Σ v_i μ_i‖`
    pub source_norm: f64,
    /// `‖Σ v_i κ_i‖`
    pub remainder_norm: f64,
    /// `‖Σ v_i Φκ_i‖`
    pub image_remainder_norm: f64,
    /// `Σ_j ‖Σ_i α_{i,j} v_i‖ ‖μ_{S_j}‖`
    pub class_sum: f64,
    /// Largest deviation between `Σ v_i Φμ_i` and its expansion over the
    /// partition classes.
    pub expansion_error: f64,
    /// `image_norm <= operator_norm · source_norm` (within `NORM_TOL`).
    pub bound_holds: bool,
    /// Every intermediate estimate of the proof holds numerically.
    pub chain_holds: bool,
}

pub fn bound_certificate(ext: &VectorExtension, rep: &SeriesRepresentation, epsilon: f64) -> Result<BoundCertificate> {
    let phi = ext.transfunction();
    phi.domain().ensure_compatible(rep.space())?;
    let codomain = *rep.codomain();
    let c = ext.operator_norm().value;
    let source_norm = rep.evaluate().norm();
    let direct = ext.extend(rep)?;
    let image_norm = direct.norm();

    let vector_sum: f64 = rep.terms().iter().map(|t| codomain.norm(&t.vector)).sum();
    let partition_epsilon = epsilon / (2.0 * vector_sum.max(1.0) * c.max(1.0));
    let (remainder_norm, image_remainder_norm, class_sum, expansion_error) = if rep.is_empty() {
        (0.0, 0.0, 0.0, 0.0)
    } else {
        let measures: Vec<PositiveMeasure> = rep.terms().iter().map(|t| t.measure.clone()).collect();
        let approx = lemma1_partition(&measures, partition_epsilon)?;

        let combine = |parts: Vec<PositiveMeasure>| -> Result<VectorMeasure> {
            let terms = rep
                .terms()
                .iter()
                .zip(parts)
                .map(|(t, measure)| SeriesTerm {
                    vector: t.vector.clone(),
                    measure,
                })
                .collect();
            Ok(SeriesRepresentation::new(rep.space().clone(), codomain, terms)?.evaluate())
        };
        let remainder = combine(approx.remainders.clone())?;
        let image_remainders = approx
            .remainders
            .iter()
            .map(|k| phi.apply(k))
            .collect::<Result<Vec<_>>>()?;
        let mut expansion: Vec<Vec<f64>> = vec![codomain.zero(); phi.codomain().count()];
        for (t, k) in rep.terms().iter().zip(&image_remainders) {
            for (acc, &m) in expansion.iter_mut().zip(k.mass()) {
                axpy(acc, m, &t.vector);
            }
        }
        let image_remainder_norm = expansion.iter().map(|v| codomain.norm(v)).sum();

        let mut class_sum = 0.0;
        for class in approx.classes.iter().filter(|c| !c.null) {
            let mut w = codomain.zero();
            for (t, &alpha) in rep.terms().iter().zip(&class.coefficients) {
                axpy(&mut w, alpha, &t.vector);
            }
            let restricted = approx.reference.restrict(&class.atoms)?;
            class_sum += codomain.norm(&w) * restricted.norm();
            let image = phi.apply(&restricted)?;
            for (acc, &m) in expansion.iter_mut().zip(image.mass()) {
                axpy(acc, m, &w);
            }
        }
        let mut expansion_error: f64 = 0.0;
        for (e, d) in expansion.iter().zip(direct.values()) {
            let mut diff = e.clone();
            add_assign(&mut diff, &d.iter().map(|x| -x).collect::<Vec<_>>());
            expansion_error = expansion_error.max(codomain.norm(&diff));
        }
        (remainder.norm(), image_remainder_norm, class_sum, expansion_error)
    };

    let half = epsilon / 2.0;
    let bound_holds = image_norm <= c * source_norm + NORM_TOL;
    let chain_holds = remainder_norm < half
        && image_remainder_norm < half
        && image_norm <= c * class_sum + image_remainder_norm + expansion_error + NORM_TOL
        && class_sum <= source_norm + remainder_norm + NORM_TOL
        && image_norm <= c * source_norm + epsilon + NORM_TOL;
    Ok(BoundCertificate {
        epsilon,
        partition_epsilon,
        operator_norm: c,
        image_norm,
        source_norm,
        remainder_norm,
        image_remainder_norm,
        class_sum,
        expansion_error,
        bound_holds,
        chain_holds,
    })
}
