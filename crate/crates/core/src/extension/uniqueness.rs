//! Probes for the uniqueness of the Jordan extension.
//!
//! A candidate is any map on signed measures that agrees with `Φ` on the
//! positive cone. Candidates that are strongly additive (or weakly additive
//! and odd) must coincide with `Φ̃`; the probes check that on samples and
//! record where the others part ways.

use serde::{Deserialize, Serialize};

use super::extend_signed;
use crate::error::{Error, Result};
use crate::measure::{PositiveMeasure, SignedMeasure};
use crate::sample;
use crate::transfunction::{check_property, sweep, Cone, Property, SamplerConfig, Transfunction, Verdict};

const RESTRICTION_STREAM: u64 = 41;
const AGREEMENT_STREAM: u64 = 42;
const ODDNESS_STREAM: u64 = 43;

pub trait ExtensionCandidate {
    fn name(&self) -> String;
    fn eval(&self, phi: &Transfunction, mu: &SignedMeasure) -> Result<SignedMeasure>;
}

/// `Φμ⁺ − Φμ⁻`.
pub struct JordanExtension;

impl ExtensionCandidate for JordanExtension {
    fn name(&self) -> String {
        "jordan".into()
    }

    fn eval(&self, phi: &Transfunction, mu: &SignedMeasure) -> Result<SignedMeasure> {
        extend_signed(phi, mu)
    }
}

/// `Φ(μ⁺ + η) − Φ(μ⁻ + η)`: the extension through a non-minimal
/// decomposition `μ = (μ⁺ + η) − (μ⁻ + η)`.
pub struct DecompositionShift {
    pub eta: PositiveMeasure,
}

impl ExtensionCandidate for DecompositionShift {
    fn name(&self) -> String {
        "decomposition_shift".into()
    }

    fn eval(&self, phi: &Transfunction, mu: &SignedMeasure) -> Result<SignedMeasure> {
        let (pos, neg) = mu.jordan();
        phi.apply(&pos.add(&self.eta)?)?.difference(&phi.apply(&neg.add(&self.eta)?)?)
    }
}

/// `Φμ⁺`, discarding the negative part. Agrees with `Φ` on positives and
/// nowhere else.
pub struct PositivePartOnly;

impl ExtensionCandidate for PositivePartOnly {
    fn name(&self) -> String {
        "positive_part_only".into()
    }

    fn eval(&self, phi: &Transfunction, mu: &SignedMeasure) -> Result<SignedMeasure> {
        Ok(phi.apply(&mu.jordan().0)?.to_signed())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateResult {
    pub name: String,
    /// The structural hypothesis of the uniqueness statement, sampled on
    /// signed measures.
    pub hypothesis: Verdict,
    pub agrees: bool,
    pub max_deviation: f64,
    /// First sampled measure where the candidate differs from `Φ̃`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub disagreement: Option<SignedMeasure>,
}

impl CandidateResult {
    /// Satisfies the hypothesis yet differs from `Φ̃`.
    pub fn contradicts_uniqueness(&self) -> bool {
        self.hypothesis.holds() && !self.agrees
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniquenessReport {
    pub hypothesis: String,
    pub seed: u64,
    pub trials: usize,
    pub tolerance: f64,
    pub candidates: Vec<CandidateResult>,
}

impl UniquenessReport {
    pub fn consistent(&self) -> bool {
        !self.candidates.iter().any(CandidateResult::contradicts_uniqueness)
    }
}

/// Uniqueness among strongly additive extensions. Requires `Φ` to be
/// strongly additive on the sample.
pub fn uniqueness_probe_strong(
    phi: &Transfunction,
    candidates: &[&dyn ExtensionCandidate],
    config: &SamplerConfig,
) -> Result<UniquenessReport> {
    require(phi, Property::StronglyAdditive, config)?;
    probe(phi, candidates, config, "strongly_additive", |c| {
        let eval = |mu: &SignedMeasure| c.eval(phi, mu);
        Ok(sweep(&eval, phi.domain(), Property::StronglyAdditive, Cone::Signed, config, None)?.verdict)
    })
}

/// Uniqueness among weakly additive extensions with `Ψ(−μ) = −Ψμ` for
/// positive `μ`. Requires `Φ` to be weakly additive on the sample.
pub fn uniqueness_probe_weak(
    phi: &Transfunction,
    candidates: &[&dyn ExtensionCandidate],
    config: &SamplerConfig,
) -> Result<UniquenessReport> {
    require(phi, Property::WeaklyAdditive, config)?;
    probe(phi, candidates, config, "weakly_additive_and_odd", |c| {
        let eval = |mu: &SignedMeasure| c.eval(phi, mu);
        let weak = sweep(&eval, phi.domain(), Property::WeaklyAdditive, Cone::Signed, config, None)?.verdict;
        if !weak.holds() {
            return Ok(weak);
        }
        for t in 0..config.trials {
            let mut rng = sample::trial_rng(config.seed, ODDNESS_STREAM, t as u64);
            let mu = sample::positive(phi.domain(), config.mass_scale, &mut rng).to_signed();
            let lhs = c.eval(phi, &mu.neg())?;
            let rhs = c.eval(phi, &mu)?.neg();
            let deviation = lhs.max_abs_diff(&rhs).unwrap_or(f64::INFINITY);
            if deviation > config.tolerance {
                return Ok(Verdict::Violated {
                    witness: Box::new(crate::transfunction::Witness::Scaling { measure: mu, alpha: -1.0 }),
                    deviation,
                    trial: t,
                });
            }
        }
        Ok(Verdict::HoldsOnSample)
    })
}

fn require(phi: &Transfunction, property: Property, config: &SamplerConfig) -> Result<()> {
    let entry = check_property(phi, property, config)?;
    if entry.structural == Some(false) || !entry.verdict.holds() {
        return Err(Error::HypothesisFailed {
            property: property.name().to_owned(),
            detail: "uniqueness probes need it on the positive cone".into(),
        });
    }
    Ok(())
}

fn probe(
    phi: &Transfunction,
    candidates: &[&dyn ExtensionCandidate],
    config: &SamplerConfig,
    hypothesis: &str,
    check: impl Fn(&dyn ExtensionCandidate) -> Result<Verdict>,
) -> Result<UniquenessReport> {
    let mut results = Vec::with_capacity(candidates.len());
    for &candidate in candidates {
        for t in 0..config.trials {
            let mut rng = sample::trial_rng(config.seed, RESTRICTION_STREAM, t as u64);
            let mu = sample::positive(phi.domain(), config.mass_scale, &mut rng);
            let expected = phi.apply(&mu)?.to_signed();
            let got = candidate.eval(phi, &mu.to_signed())?;
            let deviation = got.max_abs_diff(&expected).unwrap_or(f64::INFINITY);
            if deviation > config.tolerance {
                return Err(Error::NotAnExtension {
                    candidate: candidate.name(),
                    deviation,
                });
            }
        }
        let mut max_deviation: f64 = 0.0;
        let mut disagreement = None;
        for t in 0..config.trials {
            let mut rng = sample::trial_rng(config.seed, AGREEMENT_STREAM, t as u64);
            let mu = sample::signed(phi.domain(), config.mass_scale, &mut rng);
            let deviation = candidate
                .eval(phi, &mu)?
                .max_abs_diff(&extend_signed(phi, &mu)?)
                .unwrap_or(f64::INFINITY);
            if deviation > config.tolerance && disagreement.is_none() {
                disagreement = Some(mu);
            }
            max_deviation = max_deviation.max(deviation);
        }
        results.push(CandidateResult {
            name: candidate.name(),
            hypothesis: check(candidate)?,
            agrees: disagreement.is_none(),
            max_deviation,
            disagreement,
        });
    }
    Ok(UniquenessReport {
        hypothesis: hypothesis.to_owned(),
        seed: config.seed,
        trials: config.trials,
        tolerance: config.tolerance,
        candidates: results,
    })
}
