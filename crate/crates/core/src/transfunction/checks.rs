//! Single-case deviation measurements shared by the property checkers for
//! transfunctions and for their signed extensions, plus replayable
//! witnesses.
//!
//! Every check is phrased over a map `SignedMeasure -> SignedMeasure`; a
//! transfunction on positive measures is wrapped so that it rejects inputs
//! with negative mass.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::measure::SignedMeasure;

/// Length of a continuity probe sequence `μ_n = μ + ρ/n`.
pub const PROBE_LEN: usize = 32;

/// Slack for the monotone-decay test on probe residuals.
pub const PROBE_TOL: f64 = 1e-6;

/// Scales at which `‖Φ(sμ)‖ / ‖sμ‖` is sampled when looking for unbounded
/// growth.
pub const GROWTH_SCALES: [f64; 10] = [1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3, 1e4, 1e5, 1e6];

/// A nondecreasing ratio sequence that grows by at least this factor is
/// reported as unbounded.
pub const GROWTH_FACTOR: f64 = 1e3;

pub type Eval<'a> = dyn Fn(&SignedMeasure) -> Result<SignedMeasure> + 'a;

fn max_diff(a: &SignedMeasure, b: &SignedMeasure) -> Result<f64> {
    Ok(a.sub(b)?.mass().iter().fold(0.0, |m: f64, x| m.max(x.abs())))
}

/// `max_b |Φ(a+b) − Φa − Φb|`.
pub fn additivity_deviation(eval: &Eval, a: &SignedMeasure, b: &SignedMeasure) -> Result<f64> {
    let lhs = eval(&a.add(b)?)?;
    let rhs = eval(a)?.add(&eval(b)?)?;
    max_diff(&lhs, &rhs)
}

/// `max_b |Φ(a−b) − (Φa − Φb)|`.
pub fn difference_deviation(eval: &Eval, a: &SignedMeasure, b: &SignedMeasure) -> Result<f64> {
    let lhs = eval(&a.sub(b)?)?;
    let rhs = eval(a)?.sub(&eval(b)?)?;
    max_diff(&lhs, &rhs)
}

/// `max_b |Φ(αμ) − αΦμ|`.
pub fn homogeneity_deviation(eval: &Eval, mu: &SignedMeasure, alpha: f64) -> Result<f64> {
    let lhs = eval(&mu.scale(alpha))?;
    let rhs = eval(mu)?.scale(alpha);
    max_diff(&lhs, &rhs)
}

/// How far `Φ(lower) <= Φ(upper)` fails atomwise (zero if it holds).
pub fn monotone_deviation(eval: &Eval, lower: &SignedMeasure, upper: &SignedMeasure) -> Result<f64> {
    let gap = eval(lower)?.sub(&eval(upper)?)?;
    Ok(gap.mass().iter().fold(0.0, |m: f64, &x| m.max(x)))
}

/// `|‖Φμ‖ − ‖μ‖|`.
pub fn norm_deviation(eval: &Eval, mu: &SignedMeasure) -> Result<f64> {
    Ok((eval(mu)?.norm() - mu.norm()).abs())
}

/// `‖Φμ‖ − C‖μ‖`; positive means the bound fails.
pub fn bound_excess(eval: &Eval, mu: &SignedMeasure, constant: f64) -> Result<f64> {
    Ok(eval(mu)?.norm() - constant * mu.norm())
}

/// `‖Φ(sμ)‖ / ‖sμ‖` for each `s` in [`GROWTH_SCALES`]; `μ` must be nonzero.
pub fn growth_ratios(eval: &Eval, mu: &SignedMeasure) -> Result<Vec<f64>> {
    GROWTH_SCALES
        .iter()
        .map(|&s| {
            let scaled = mu.scale(s);
            Ok(eval(&scaled)?.norm() / scaled.norm())
        })
        .collect()
}

pub fn growth_diverges(ratios: &[f64]) -> bool {
    let (first, last) = (ratios[0], ratios[ratios.len() - 1]);
    first > 0.0 && ratios.windows(2).all(|w| w[1] >= w[0]) && last >= GROWTH_FACTOR * first
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeMode {
    /// `sup_B |Φμ_n(B) − Φμ(B)|`
    Setwise,
    /// `‖Φμ_n − Φμ‖`
    Uniform,
}

/// Residuals along `μ_n = μ + ρ/n`, `n = 1..=PROBE_LEN`.
pub fn probe_residuals(eval: &Eval, mu: &SignedMeasure, rho: &SignedMeasure, mode: ProbeMode) -> Result<Vec<f64>> {
    let base = eval(mu)?;
    (1..=PROBE_LEN)
        .map(|n| {
            let mu_n = mu.add(&rho.scale(1.0 / n as f64))?;
            let diff = eval(&mu_n)?.sub(&base)?;
            Ok(match mode {
                ProbeMode::Setwise => diff.sup_set_value(),
                ProbeMode::Uniform => diff.norm(),
            })
        })
        .collect()
}

/// Residuals must not increase (up to [`PROBE_TOL`]) and must at least halve
/// between the first and the last probe.
pub fn probe_converges(residuals: &[f64]) -> bool {
    let monotone = residuals.windows(2).all(|w| w[1] <= w[0] + PROBE_TOL);
    let first = residuals[0];
    let last = residuals[residuals.len() - 1];
    monotone && last <= first / 2.0 + PROBE_TOL
}

/// A concrete input on which a check failed. Replaying it recomputes the
/// failing quantity from scratch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    Additive { first: SignedMeasure, second: SignedMeasure },
    Difference { first: SignedMeasure, second: SignedMeasure },
    Scaling { measure: SignedMeasure, alpha: f64 },
    Ordered { lower: SignedMeasure, upper: SignedMeasure },
    NormChange { measure: SignedMeasure },
    BoundExceeded { measure: SignedMeasure, constant: f64 },
    Growth { measure: SignedMeasure, ratios: Vec<f64> },
    Probe { measure: SignedMeasure, perturbation: SignedMeasure, mode: ProbeMode, residuals: Vec<f64> },
}

/// Recomputes the witness through `eval`; `true` if the violation
/// reproduces at tolerance `tol`.
pub fn replay(eval: &Eval, witness: &Witness, tol: f64) -> Result<bool> {
    Ok(match witness {
        Witness::Additive { first, second } => additivity_deviation(eval, first, second)? > tol,
        Witness::Difference { first, second } => difference_deviation(eval, first, second)? > tol,
        Witness::Scaling { measure, alpha } => homogeneity_deviation(eval, measure, *alpha)? > tol,
        Witness::Ordered { lower, upper } => monotone_deviation(eval, lower, upper)? > tol,
        Witness::NormChange { measure } => norm_deviation(eval, measure)? > tol,
        Witness::BoundExceeded { measure, constant } => bound_excess(eval, measure, *constant)? > tol,
        Witness::Growth { measure, .. } => growth_diverges(&growth_ratios(eval, measure)?),
        Witness::Probe {
            measure,
            perturbation,
            mode,
            ..
        } => !probe_converges(&probe_residuals(eval, measure, perturbation, *mode)?),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Verdict {
    HoldsOnSample,
    Violated { witness: Box<Witness>, deviation: f64, trial: usize },
    NotTested { reason: String },
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::HoldsOnSample)
    }

    pub fn is_violated(&self) -> bool {
        matches!(self, Verdict::Violated { .. })
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::Violated { witness, .. } => Some(witness),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::MeasurableSpace;

    fn signed(mass: &[f64]) -> SignedMeasure {
        SignedMeasure::new(MeasurableSpace::atomic(mass.len()).unwrap(), mass.to_vec()).unwrap()
    }

    #[test]
    fn convergence_rule() {
        let harmonic: Vec<f64> = (1..=PROBE_LEN).map(|n| 1.0 / n as f64).collect();
        assert!(probe_converges(&harmonic));
        assert!(!probe_converges(&[1.0; PROBE_LEN]));
        let mut bump = harmonic.clone();
        bump[5] = 2.0;
        assert!(!probe_converges(&bump));
        assert!(probe_converges(&[0.0; PROBE_LEN]));
    }

    #[test]
    fn growth_rule() {
        let linear = |m: &SignedMeasure| -> Result<SignedMeasure> { Ok(m.scale(2.0)) };
        let mu = signed(&[1.0, -1.0]);
        assert!(!growth_diverges(&growth_ratios(&linear, &mu).unwrap()));
        let square = |m: &SignedMeasure| -> Result<SignedMeasure> {
            let t = m.norm();
            Ok(m.scale(t))
        };
        assert!(growth_diverges(&growth_ratios(&square, &mu).unwrap()));
    }

    #[test]
    fn witness_json_is_tagged() {
        let w = Witness::Scaling {
            measure: signed(&[1.0]),
            alpha: 2.0,
        };
        let json = serde_json::to_string(&w).unwrap();
        assert!(json.starts_with(r#"{"kind":"scaling""#));
        assert_eq!(serde_json::from_str::<Witness>(&json).unwrap(), w);
    }
}
