//! Extensions of transfunctions beyond the positive cone: to signed measures
//! via the Jordan decomposition, and to vector measures via series
//! representations.

mod partition;
mod series;
mod transfer;
mod uniqueness;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::measure::{MeasurableSpace, SignedMeasure};
use crate::transfunction::Transfunction;

pub use partition::{lemma1_partition, PartitionApproximation, PartitionClass};
pub use series::{
    bound_certificate, extend_vector, series_decompose, BoundCertificate, SeriesRepresentation, SeriesTerm,
    VectorExtension, DEFAULT_GROUPING_TOL,
};
pub use transfer::{verify_extension_properties, Clause, ClauseEntry, ExtensionReport};
pub use uniqueness::{
    uniqueness_probe_strong, uniqueness_probe_weak, CandidateResult, DecompositionShift, ExtensionCandidate,
    JordanExtension, PositivePartOnly, UniquenessReport,
};

/// `Φ̃μ = Φμ⁺ − Φμ⁻`.
pub fn extend_signed(phi: &Transfunction, mu: &SignedMeasure) -> Result<SignedMeasure> {
    phi.domain().ensure_compatible(mu.space())?;
    let (pos, neg) = mu.jordan();
    phi.apply(&pos)?.difference(&phi.apply(&neg)?)
}

/// A norm-preserving transfunction whose signed extension is not.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormCounterexample {
    pub transfunction: Transfunction,
    pub measure: SignedMeasure,
    pub image: SignedMeasure,
    pub measure_norm: f64,
    pub image_norm: f64,
}

impl NormCounterexample {
    pub fn for_transfunction(phi: Transfunction, measure: SignedMeasure) -> Result<Self> {
        let image = extend_signed(&phi, &measure)?;
        Ok(NormCounterexample {
            measure_norm: measure.norm(),
            image_norm: image.norm(),
            transfunction: phi,
            measure,
            image,
        })
    }

    pub fn breaks_norm(&self) -> bool {
        self.measure_norm != self.image_norm
    }
}

/// Uniform spread from two atoms onto a four-cell grid, applied to
/// `δ₀ − δ₁`: both parts land on the same uniform measure and cancel.
pub fn norm_preservation_counterexample() -> NormCounterexample {
    let domain = MeasurableSpace::atomic(2).expect("two atoms");
    let phi = Transfunction::uniform_spread(domain.clone(), MeasurableSpace::grid(4).expect("dyadic grid"));
    let mu = SignedMeasure::new(domain, vec![1.0, -1.0]).expect("finite masses");
    NormCounterexample::for_transfunction(phi, mu).expect("spaces agree")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::PositiveMeasure;
    use crate::sample;
    use rand::Rng;

    fn atomic(n: usize) -> MeasurableSpace {
        MeasurableSpace::atomic(n).unwrap()
    }

    #[test]
    fn uniform_spread_cancels_symmetric_input() {
        let c = norm_preservation_counterexample();
        assert_eq!((c.measure_norm, c.image_norm), (2.0, 0.0));
        assert!(c.image.mass().iter().all(|&m| m == 0.0));
        assert!(c.breaks_norm());
    }

    #[test]
    fn pushforwards_on_the_same_input() {
        let mu = SignedMeasure::new(atomic(2), vec![1.0, -1.0]).unwrap();
        let injective = Transfunction::pushforward(atomic(2), atomic(3), vec![2, 0]).unwrap();
        assert_eq!(extend_signed(&injective, &mu).unwrap().norm(), 2.0);
        let collapsing = Transfunction::pushforward(atomic(2), atomic(3), vec![1, 1]).unwrap();
        assert_eq!(extend_signed(&collapsing, &mu).unwrap().norm(), 0.0);
    }

    #[test]
    fn kernel_extension_is_the_signed_matrix_product() {
        let mut rng = sample::rng(21);
        for _ in 0..100 {
            let (m, k) = (rng.random_range(1..7), rng.random_range(1..7));
            let matrix: Vec<Vec<f64>> = (0..m).map(|_| (0..k).map(|_| rng.random_range(0.0..3.0)).collect()).collect();
            let phi = Transfunction::kernel(atomic(m), atomic(k), matrix.clone()).unwrap();
            let mu = sample::signed(&atomic(m), 2.0, &mut rng);
            let direct: Vec<f64> = (0..k)
                .map(|b| (0..m).map(|a| mu.mass()[a] * matrix[a][b]).sum())
                .collect();
            let got = extend_signed(&phi, &mu).unwrap();
            for (x, y) in got.mass().iter().zip(&direct) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn extension_restricts_and_is_odd() {
        let mut rng = sample::rng(5);
        let phi = Transfunction::new(atomic(4), atomic(3), crate::transfunction::Rule::SquareMassSpread).unwrap();
        for _ in 0..50 {
            let pos: PositiveMeasure = sample::positive(&atomic(4), 1.0, &mut rng);
            assert_eq!(extend_signed(&phi, &pos.to_signed()).unwrap(), phi.apply(&pos).unwrap().to_signed());
            let mu = sample::signed(&atomic(4), 1.0, &mut rng);
            let lhs = extend_signed(&phi, &mu.neg()).unwrap();
            let rhs = extend_signed(&phi, &mu).unwrap().neg();
            assert!(lhs.approx_eq(&rhs, 0.0));
        }
    }

    #[test]
    fn space_mismatch_is_rejected() {
        let phi = Transfunction::uniform_spread(atomic(2), atomic(2));
        let mu = SignedMeasure::zero(atomic(3));
        assert!(extend_signed(&phi, &mu).is_err());
    }
}
