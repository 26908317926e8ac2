use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use hybrid_bell::error::Error;
use hybrid_bell::family::{family_inequality, gamma_bound, gamma_bound_exhaustive};
use hybrid_bell::models::{CardinalityTuple, HybridModel};
use hybrid_bell::scenario::Scenario;

/// Direct vertex maximization agrees with the two-cell reduction.
#[test]
fn vertex_bound_matches_gamma() {
    for n in 3..=6 {
        let ineq = family_inequality(n).unwrap().to_symmetric().unwrap();
        let s = Scenario::new(n, 2).unwrap();
        for k in (n.div_ceil(2)..n).rev() {
            let h = CardinalityTuple::new(vec![k, n - k]).unwrap();
            let model = match HybridModel::full_body(s, h.clone()) {
                Ok(m) => m,
                Err(Error::CapExceeded(_)) => continue,
                Err(e) => panic!("{e}"),
            };
            let bound = match model.classical_bound(&ineq) {
                Ok(b) => b,
                Err(Error::CapExceeded(_)) => continue,
                Err(e) => panic!("{e}"),
            };
            let gamma = gamma_bound(k, n - k).unwrap();
            assert_eq!(bound, BigRational::from_integer(BigInt::from(gamma)), "n={n} h={h}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn gamma_search_is_exhaustive(k in 1usize..=7, m in 1usize..=5) {
        prop_assert_eq!(gamma_bound(k, m).unwrap(), gamma_bound_exhaustive(k, m).unwrap());
    }

    #[test]
    fn gamma_is_symmetric(k in 1usize..=10, m in 1usize..=10) {
        prop_assert_eq!(gamma_bound(k, m).unwrap(), gamma_bound(m, k).unwrap());
    }
}
