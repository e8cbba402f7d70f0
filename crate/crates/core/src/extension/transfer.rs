//! Which properties of `Φ` carry over to its Jordan extension `Φ̃`.
//!
//! Each clause names the properties of `Φ` it assumes and the property it
//! claims for `Φ̃`. The premise is audited with the positive-cone checker;
//! when it holds, the claim is tested on signed samples. A violated claim
//! whose premise held is reported as a finding rather than suppressed.

use serde::{Deserialize, Serialize};

use super::extend_signed;
use crate::error::Result;
use crate::measure::SignedMeasure;
use crate::sample;
use crate::transfunction::{
    check_all, difference_deviation, operator_norm, sweep, Cone, NormMethod, Property, PropertyReport, SamplerConfig,
    Verdict, Witness,
};
use crate::transfunction::Transfunction;

/// Stream tag for the difference-of-positives sweep, clear of the
/// per-property tags.
const DIFFERENCE_STREAM: u64 = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Clause {
    /// Additive and subtractive on mutually singular signed pairs.
    A,
    B,
    /// Homogeneous for every real scaling, including negative ones.
    C,
    D,
    E,
    /// Same bound constant as `Φ`.
    F,
    G,
    H,
    /// `Φ̃(μ₁ − μ₂) = Φμ₁ − Φμ₂` for arbitrary positive `μ₁, μ₂`.
    DifferenceOfPositives,
}

impl Clause {
    pub const ALL: [Clause; 9] = [
        Clause::A,
        Clause::B,
        Clause::C,
        Clause::D,
        Clause::E,
        Clause::F,
        Clause::G,
        Clause::H,
        Clause::DifferenceOfPositives,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Clause::A => "a",
            Clause::B => "b",
            Clause::C => "c",
            Clause::D => "d",
            Clause::E => "e",
            Clause::F => "f",
            Clause::G => "g",
            Clause::H => "h",
            Clause::DifferenceOfPositives => "difference_of_positives",
        }
    }

    pub fn premises(self) -> &'static [Property] {
        use Property::*;
        match self {
            Clause::A => &[WeaklyAdditive],
            Clause::B | Clause::DifferenceOfPositives => &[StronglyAdditive],
            Clause::C => &[Homogeneous],
            Clause::D => &[Monotone, StronglyAdditive],
            Clause::E => &[NormPreserving],
            Clause::F => &[Bounded],
            Clause::G => &[SetwiseContinuous],
            Clause::H => &[UniformlyContinuous],
        }
    }

    /// The property claimed for the extension; `None` for the
    /// difference-of-positives identity.
    pub fn conclusion(self) -> Option<Property> {
        use Property::*;
        match self {
            Clause::A => Some(WeaklyAdditive),
            Clause::B => Some(StronglyAdditive),
            Clause::C => Some(Homogeneous),
            Clause::D => Some(Monotone),
            Clause::E => Some(NormPreserving),
            Clause::F => Some(Bounded),
            Clause::G => Some(SetwiseContinuous),
            Clause::H => Some(UniformlyContinuous),
            Clause::DifferenceOfPositives => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClauseEntry {
    pub clause: Clause,
    pub premises: Vec<Property>,
    pub premise_holds: bool,
    /// The transfer is asserted whenever the premise holds.
    pub claimed_transfer: bool,
    pub observed: Verdict,
    pub trials_run: usize,
    /// Bound constant used by clause `f`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constant: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constant_method: Option<NormMethod>,
}

impl ClauseEntry {
    /// Claimed but contradicted on the sample.
    pub fn is_finding(&self) -> bool {
        self.claimed_transfer && self.observed.is_violated()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtensionReport {
    pub seed: u64,
    pub trials: usize,
    pub premises: PropertyReport,
    pub clauses: Vec<ClauseEntry>,
}

impl ExtensionReport {
    pub fn clause(&self, clause: Clause) -> &ClauseEntry {
        self.clauses.iter().find(|e| e.clause == clause).expect("every clause is reported")
    }

    pub fn findings(&self) -> Vec<Clause> {
        self.clauses.iter().filter(|e| e.is_finding()).map(|e| e.clause).collect()
    }
}

pub fn verify_extension_properties(phi: &Transfunction, config: &SamplerConfig) -> Result<ExtensionReport> {
    let premises = check_all(phi, config)?;
    let confirmed = |p: Property| {
        let e = premises.entry(p).expect("all properties checked");
        e.verdict.holds() && e.structural != Some(false)
    };
    let eval = |mu: &SignedMeasure| extend_signed(phi, mu);
    let mut clauses = Vec::with_capacity(Clause::ALL.len());
    for clause in Clause::ALL {
        let premise_holds = clause.premises().iter().all(|&p| confirmed(p));
        let (mut constant, mut constant_method) = (None, None);
        let (observed, trials_run) = if !premise_holds {
            (
                Verdict::NotTested {
                    reason: "premise not confirmed on the positive cone".into(),
                },
                0,
            )
        } else {
            match clause.conclusion() {
                Some(Property::Bounded) => {
                    let norm = operator_norm(phi, config)?;
                    constant = Some(norm.value);
                    constant_method = Some(norm.method);
                    let out = sweep(&eval, phi.domain(), Property::Bounded, Cone::Signed, config, Some(norm.value))?;
                    (out.verdict, out.trials_run)
                }
                Some(p) => {
                    let out = sweep(&eval, phi.domain(), p, Cone::Signed, config, None)?;
                    (out.verdict, out.trials_run)
                }
                None => difference_of_positives(phi, config)?,
            }
        };
        clauses.push(ClauseEntry {
            clause,
            premises: clause.premises().to_vec(),
            premise_holds,
            claimed_transfer: premise_holds,
            observed,
            trials_run,
            constant,
            constant_method,
        });
    }
    Ok(ExtensionReport {
        seed: config.seed,
        trials: config.trials,
        premises,
        clauses,
    })
}

fn difference_of_positives(phi: &Transfunction, config: &SamplerConfig) -> Result<(Verdict, usize)> {
    let eval = |mu: &SignedMeasure| extend_signed(phi, mu);
    for t in 0..config.trials {
        let mut rng = sample::trial_rng(config.seed, DIFFERENCE_STREAM, t as u64);
        let a = sample::positive(phi.domain(), config.mass_scale, &mut rng).to_signed();
        let b = sample::positive(phi.domain(), config.mass_scale, &mut rng).to_signed();
        let deviation = difference_deviation(&eval, &a, &b)?;
        if deviation > config.tolerance {
            let witness = Box::new(Witness::Difference { first: a, second: b });
            return Ok((
                Verdict::Violated {
                    witness,
                    deviation,
                    trial: t,
                },
                t + 1,
            ));
        }
    }
    Ok((Verdict::HoldsOnSample, config.trials))
}
