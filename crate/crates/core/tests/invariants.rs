use proptest::prelude::*;

use tfkit::extension::extend_signed;
use tfkit::measure::{MeasurableSpace, PositiveMeasure};
use tfkit::transfunction::Transfunction;

fn kernel_and_pair() -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<f64>, Vec<f64>)> {
    (1usize..6, 1usize..6).prop_flat_map(|(rows, cols)| {
        (
            prop::collection::vec(prop::collection::vec(0.0..2.0f64, cols), rows),
            prop::collection::vec(0.0..10.0f64, rows),
            prop::collection::vec(0.0..10.0f64, rows),
        )
    })
}

proptest! {
    // Any split of a signed measure into positives gives the same image.
    #[test]
    fn extension_ignores_the_chosen_decomposition((matrix, a, b) in kernel_and_pair()) {
        let (rows, cols) = (matrix.len(), matrix[0].len());
        let domain = MeasurableSpace::atomic(rows).unwrap();
        let phi = Transfunction::kernel(domain.clone(), MeasurableSpace::atomic(cols).unwrap(), matrix).unwrap();
        let a = PositiveMeasure::new(domain.clone(), a).unwrap();
        let b = PositiveMeasure::new(domain, b).unwrap();
        let lhs = extend_signed(&phi, &a.difference(&b).unwrap()).unwrap();
        let rhs = phi.apply(&a).unwrap().difference(&phi.apply(&b).unwrap()).unwrap();
        let scale = 1.0 + a.total() + b.total();
        prop_assert!(lhs.max_abs_diff(&rhs).unwrap() <= 1e-12 * scale);
    }
}
