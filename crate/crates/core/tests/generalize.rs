use num_bigint::BigInt;
use num_rational::BigRational;

use hybrid_bell::generalize::{reduce_inequality, ExtensionRule, Generalizer};
use hybrid_bell::inequality::MarginalConvention;
use hybrid_bell::models::HybridModel;
use hybrid_bell::named;
use hybrid_bell::scenario::Scenario;

/// Every LP solution is a tight valid inequality of the target model whose
/// reduction is valid for the base model.
#[test]
fn solutions_are_valid_and_reduce_to_valid_inequalities() {
    let svet = named::svetlichny();
    let (s1, s2) = (*svet.scenario(), Scenario::new(3, 3).unwrap());
    let h = "2,1".parse().unwrap();
    let base_model = HybridModel::full_body(s1, "2,1".parse().unwrap()).unwrap();
    let rule = ExtensionRule::parse(s1, s2, "A3=A1,B3=B1,C3=C1").unwrap();
    let g = Generalizer::new(svet, rule.clone(), h, MarginalConvention::UniformAverage).unwrap();
    let mut pool = Vec::new();
    for seed in 0..4 {
        let r = g.solve_with_pool(&g.random_direction(seed), &mut pool).unwrap();
        let bound = g.target.classical_bound(&r.inequality).unwrap();
        assert_eq!(&bound, r.inequality.constant(), "seed {seed}: {}", r.inequality);
        let reduced = reduce_inequality(&r.inequality, &rule).unwrap();
        assert!(base_model.classical_bound(&reduced).unwrap() <= *reduced.constant());
    }
}

#[test]
fn f1_and_f2_bounds() {
    let s2 = Scenario::new(3, 3).unwrap();
    let target = hybrid_bell::generalize::TargetModel::build(s2, "2,1".parse().unwrap(), MarginalConvention::UniformAverage).unwrap();
    let q = |x: i64| BigRational::from_integer(BigInt::from(x));
    assert_eq!(target.classical_bound(&named::f1()).unwrap(), q(13));
    assert_eq!(target.classical_bound(&named::f2()).unwrap(), q(12));
}
