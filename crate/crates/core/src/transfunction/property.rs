//! Sampled property sweeps and the operator norm.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::checks::{
    additivity_deviation, bound_excess, difference_deviation, growth_diverges, growth_ratios, homogeneity_deviation,
    monotone_deviation, norm_deviation, probe_converges, probe_residuals, Eval, ProbeMode, Verdict, Witness,
};
use super::{Property, Transfunction};
use crate::error::{Error, Result};
use crate::measure::{MeasurableSpace, PositiveMeasure, SignedMeasure};
use crate::sample::{self, SeededRng};

/// Fixed scalings tried before random ones in homogeneity sweeps.
const FIXED_SCALINGS: [f64; 3] = [0.5, 2.0, 7.3];
const FIXED_SIGNED_SCALINGS: [f64; 5] = [-1.0, 0.0, 0.5, -2.0, 7.3];

/// Probe perturbations are drawn at this fraction of the mass scale.
const PERTURBATION_SCALE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub trials: usize,
    pub seed: u64,
    pub mass_scale: f64,
    pub tolerance: f64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            trials: 200,
            seed: 0,
            mass_scale: 1.0,
            tolerance: 1e-9,
        }
    }
}

impl SamplerConfig {
    pub fn with_seed(self, seed: u64) -> Self {
        SamplerConfig { seed, ..self }
    }

    pub fn with_trials(self, trials: usize) -> Self {
        SamplerConfig { trials, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trial count must be positive".into()));
        }
        if !(self.mass_scale > 0.0 && self.mass_scale.is_finite()) {
            return Err(Error::InvalidParameter(format!("mass scale {} must be positive", self.mass_scale)));
        }
        if !(self.tolerance >= 0.0 && self.tolerance.is_finite()) {
            return Err(Error::InvalidParameter(format!("tolerance {} must be nonnegative", self.tolerance)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyEntry {
    pub property: Property,
    pub verdict: Verdict,
    pub trials_run: usize,
    pub tolerance: f64,
    pub seed: u64,
    /// Closed-form answer for the rule, when one exists.
    pub structural: Option<bool>,
    pub declared: bool,
    /// Declared, but the sample or the structural rule says otherwise.
    pub declaration_mismatch: bool,
    /// Largest `‖Φμ‖ / ‖μ‖` seen; only for `bounded`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub estimate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub rule: String,
    pub seed: u64,
    pub trials: usize,
    pub entries: Vec<PropertyEntry>,
}

impl PropertyReport {
    pub fn entry(&self, property: Property) -> Option<&PropertyEntry> {
        self.entries.iter().find(|e| e.property == property)
    }

    pub fn any_violated(&self) -> bool {
        self.entries.iter().any(|e| e.verdict.is_violated())
    }

    pub fn mismatches(&self) -> Vec<Property> {
        self.entries
            .iter()
            .filter(|e| e.declaration_mismatch)
            .map(|e| e.property)
            .collect()
    }
}

/// Which measures a sweep draws from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Cone {
    Positive,
    Signed,
}

impl Cone {
    fn stream_offset(self) -> u64 {
        match self {
            Cone::Positive => 0,
            Cone::Signed => 16,
        }
    }
}

pub(crate) struct Outcome {
    pub verdict: Verdict,
    pub trials_run: usize,
    pub estimate: Option<f64>,
}

struct Sampler<'a> {
    space: &'a MeasurableSpace,
    scale: f64,
    cone: Cone,
}

impl Sampler<'_> {
    fn measure(&self, rng: &mut SeededRng) -> SignedMeasure {
        match self.cone {
            Cone::Positive => sample::positive(self.space, self.scale, rng).to_signed(),
            Cone::Signed => sample::signed(self.space, self.scale, rng),
        }
    }

    fn nonzero(&self, rng: &mut SeededRng) -> SignedMeasure {
        loop {
            let mu = self.measure(rng);
            if mu.norm() > 0.0 {
                return mu;
            }
        }
    }

    fn positive(&self, rng: &mut SeededRng) -> SignedMeasure {
        sample::positive(self.space, self.scale, rng).to_signed()
    }

    fn singular_pair(&self, rng: &mut SeededRng) -> (SignedMeasure, SignedMeasure) {
        match self.cone {
            Cone::Positive => {
                let (a, b) = sample::singular_pair(self.space, self.scale, rng);
                (a.to_signed(), b.to_signed())
            }
            Cone::Signed => sample::signed_singular_pair(self.space, self.scale, rng),
        }
    }

    fn scaling(&self, trial: usize, rng: &mut SeededRng) -> f64 {
        match self.cone {
            Cone::Positive => FIXED_SCALINGS
                .get(trial)
                .copied()
                .unwrap_or_else(|| rng.random_range(f64::EPSILON..10.0)),
            Cone::Signed => FIXED_SIGNED_SCALINGS
                .get(trial)
                .copied()
                .unwrap_or_else(|| rng.random_range(-10.0..10.0)),
        }
    }

    fn perturbation(&self, rng: &mut SeededRng) -> SignedMeasure {
        let scale = self.scale * PERTURBATION_SCALE;
        match self.cone {
            Cone::Positive => sample::nonzero_positive(self.space, scale, rng).to_signed(),
            Cone::Signed => loop {
                let rho = sample::signed(self.space, scale, rng);
                if rho.norm() > 0.0 {
                    break rho;
                }
            },
        }
    }
}

/// Runs `config.trials` randomized checks of `property` through `eval`.
///
/// With `bound` set, the bounded check tests `‖Φμ‖ <= C‖μ‖` for that `C`
/// instead of looking for unbounded growth.
pub(crate) fn sweep(
    eval: &Eval,
    space: &MeasurableSpace,
    property: Property,
    cone: Cone,
    config: &SamplerConfig,
    bound: Option<f64>,
) -> Result<Outcome> {
    config.validate()?;
    let sampler = Sampler {
        space,
        scale: config.mass_scale,
        cone,
    };
    let tol = config.tolerance;
    let mut estimate: Option<f64> = None;
    for t in 0..config.trials {
        let mut rng = sample::trial_rng(config.seed, property.tag() + cone.stream_offset(), t as u64);
        let rng = &mut rng;
        let failure: Option<(Witness, f64)> = match property {
            Property::WeaklyAdditive => {
                let (a, b) = sampler.singular_pair(rng);
                let dev = additivity_deviation(eval, &a, &b)?;
                if dev > tol {
                    Some((Witness::Additive { first: a, second: b }, dev))
                } else if cone == Cone::Signed {
                    let dev = difference_deviation(eval, &a, &b)?;
                    (dev > tol).then_some((Witness::Difference { first: a, second: b }, dev))
                } else {
                    None
                }
            }
            Property::StronglyAdditive => {
                let (a, b) = (sampler.measure(rng), sampler.measure(rng));
                let dev = additivity_deviation(eval, &a, &b)?;
                (dev > tol).then_some((Witness::Additive { first: a, second: b }, dev))
            }
            Property::Homogeneous => {
                let mu = sampler.measure(rng);
                let alpha = sampler.scaling(t, rng);
                let dev = homogeneity_deviation(eval, &mu, alpha)?;
                (dev > tol).then_some((Witness::Scaling { measure: mu, alpha }, dev))
            }
            Property::Monotone => {
                let lower = sampler.measure(rng);
                let upper = lower.add(&sampler.positive(rng))?;
                let dev = monotone_deviation(eval, &lower, &upper)?;
                (dev > tol).then_some((Witness::Ordered { lower, upper }, dev))
            }
            Property::NormPreserving => {
                let mu = sampler.measure(rng);
                let dev = norm_deviation(eval, &mu)?;
                (dev > tol).then_some((Witness::NormChange { measure: mu }, dev))
            }
            Property::Bounded => {
                let mu = sampler.nonzero(rng);
                match bound {
                    Some(constant) => {
                        let scale = super::GROWTH_SCALES[rng.random_range(0..super::GROWTH_SCALES.len())];
                        let mu = mu.scale(scale);
                        let excess = bound_excess(eval, &mu, constant)?;
                        let ratio = eval(&mu)?.norm() / mu.norm();
                        estimate = Some(estimate.map_or(ratio, |e: f64| e.max(ratio)));
                        (excess > tol * (1.0 + constant * mu.norm()))
                            .then_some((Witness::BoundExceeded { measure: mu, constant }, excess))
                    }
                    None => {
                        let ratios = growth_ratios(eval, &mu)?;
                        let top = ratios.iter().copied().fold(0.0, f64::max);
                        estimate = Some(estimate.map_or(top, |e: f64| e.max(top)));
                        growth_diverges(&ratios).then(|| {
                            let growth = ratios[ratios.len() - 1] / ratios[0];
                            (Witness::Growth { measure: mu, ratios }, growth)
                        })
                    }
                }
            }
            Property::SetwiseContinuous | Property::UniformlyContinuous => {
                let mode = if property == Property::SetwiseContinuous {
                    ProbeMode::Setwise
                } else {
                    ProbeMode::Uniform
                };
                let mu = sampler.measure(rng);
                let rho = sampler.perturbation(rng);
                let residuals = probe_residuals(eval, &mu, &rho, mode)?;
                (!probe_converges(&residuals)).then(|| {
                    let last = residuals[residuals.len() - 1];
                    (
                        Witness::Probe {
                            measure: mu,
                            perturbation: rho,
                            mode,
                            residuals,
                        },
                        last,
                    )
                })
            }
        };
        if let Some((witness, deviation)) = failure {
            return Ok(Outcome {
                verdict: Verdict::Violated {
                    witness: Box::new(witness),
                    deviation,
                    trial: t,
                },
                trials_run: t + 1,
                estimate,
            });
        }
    }
    Ok(Outcome {
        verdict: Verdict::HoldsOnSample,
        trials_run: config.trials,
        estimate,
    })
}

pub fn check_property(phi: &Transfunction, property: Property, config: &SamplerConfig) -> Result<PropertyEntry> {
    let eval = |mu: &SignedMeasure| phi.apply_signed(mu);
    let outcome = sweep(&eval, phi.domain(), property, Cone::Positive, config, None)?;
    let structural = phi.structural(property);
    let declared = phi.declared().contains(&property);
    let refuted = outcome.verdict.is_violated() || structural == Some(false);
    Ok(PropertyEntry {
        property,
        verdict: outcome.verdict,
        trials_run: outcome.trials_run,
        tolerance: config.tolerance,
        seed: config.seed,
        structural,
        declared,
        declaration_mismatch: declared && refuted,
        estimate: if property == Property::Bounded { outcome.estimate } else { None },
    })
}

pub fn check_all(phi: &Transfunction, config: &SamplerConfig) -> Result<PropertyReport> {
    let entries = Property::ALL
        .iter()
        .map(|&p| check_property(phi, p, config))
        .collect::<Result<_>>()?;
    Ok(PropertyReport {
        rule: phi.rule().type_name().to_owned(),
        seed: config.seed,
        trials: config.trials,
        entries,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormMethod {
    Exact,
    LowerBound,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatorNorm {
    pub value: f64,
    pub method: NormMethod,
}

/// `‖Φ‖ = sup ‖Φμ‖ / ‖μ‖`.
///
/// For rules linear on the positive cone this is `max_a ‖Φ δ_a‖`, since
/// `‖Φμ‖ <= Σ μ(a) ‖Φ δ_a‖` and Dirac masses attain it. Other rules get the
/// sampled supremum, which is only a lower bound.
pub fn operator_norm(phi: &Transfunction, config: &SamplerConfig) -> Result<OperatorNorm> {
    if phi.rule().is_linear() {
        let mut value: f64 = 0.0;
        for a in 0..phi.domain().count() {
            let image = phi.apply(&PositiveMeasure::dirac(phi.domain().clone(), a)?)?;
            value = value.max(image.norm());
        }
        return Ok(OperatorNorm {
            value,
            method: NormMethod::Exact,
        });
    }
    let eval = |mu: &SignedMeasure| phi.apply_signed(mu);
    let outcome = sweep(&eval, phi.domain(), Property::Bounded, Cone::Positive, config, None)?;
    if let Verdict::Violated { witness, .. } = &outcome.verdict {
        if let Witness::Growth { measure, ratios } = witness.as_ref() {
            let top = super::GROWTH_SCALES[super::GROWTH_SCALES.len() - 1];
            return Err(Error::Unbounded {
                ratio: ratios[ratios.len() - 1],
                mass: measure.norm() * top,
            });
        }
    }
    Ok(OperatorNorm {
        value: outcome.estimate.unwrap_or(0.0),
        method: NormMethod::LowerBound,
    })
}
