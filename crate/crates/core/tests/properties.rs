use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use proptest::prelude::*;

use hybrid_bell::behavior::{Behavior, Space};
use hybrid_bell::cpt::{dd_facets, saturation_rank, Cone};
use hybrid_bell::error::Error;
use hybrid_bell::generalize::{extend_behavior, reduce_inequality, ExtensionRule};
use hybrid_bell::inequality::{MarginalConvention, SymmetricInequality};
use hybrid_bell::linalg::solve_square;
use hybrid_bell::lp::{simplex_max, simplex_max_f64, LinearProgram, Relation, VarBound};
use hybrid_bell::models::{CardinalityTuple, HybridModel};
use hybrid_bell::ns::{l1_bound, nosignaling_bound};
use hybrid_bell::scenario::{Multiset, Scenario};
use hybrid_bell::symmetry::SymmetryGroup;

fn q(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

fn multisets(n: usize, m: u8) -> Vec<Multiset> {
    fn rec(n: usize, lo: u8, m: u8, cur: &mut Vec<u8>, out: &mut Vec<Multiset>) {
        if cur.len() == n {
            out.push(Multiset(cur.clone()));
            return;
        }
        for x in lo..=m {
            cur.push(x);
            rec(n, x, m, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, 1, m, &mut Vec::new(), &mut out);
    out
}

fn levels_ineq(n: usize) -> impl Strategy<Value = SymmetricInequality> {
    (proptest::collection::vec(-3i64..=3, n + 1), 1i64..40).prop_filter_map("zero expression", move |(levels, c0)| {
        if levels.iter().all(|&c| c == 0) {
            return None;
        }
        SymmetricInequality::from_levels(Scenario::new(n, 2).unwrap(), c0, &levels).ok()
    })
}

/// Deterministic local behavior with marginals from per-party outputs.
fn local_behavior(s: Scenario, outputs: &[Vec<bool>]) -> Behavior {
    let entries = s
        .marginal_tuples()
        .iter()
        .map(|t| {
            let sign: i64 = t
                .iter()
                .enumerate()
                .filter(|&(_, &x)| x != 0)
                .map(|(k, &x)| if outputs[k][x as usize - 1] { -1 } else { 1 })
                .product();
            q(sign)
        })
        .collect();
    Behavior::new(s, Space::WithMarginals, entries).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn multiset_orderings_cover_the_tuples(n in 1usize..=6, m in 1u8..=3) {
        let ms = multisets(n, m);
        let total: u64 = ms.iter().map(|mu| mu.multiplicity()).sum();
        prop_assert_eq!(total, (m as u64).pow(n as u32));
        for mu in &ms {
            let perms = mu.permutations();
            let distinct: BTreeSet<_> = perms.iter().cloned().collect();
            prop_assert_eq!(perms.len() as u64, mu.multiplicity());
            prop_assert_eq!(distinct.len(), perms.len());
            prop_assert!(perms.iter().all(|t| Multiset::from_tuple(t) == *mu));
        }
    }

    #[test]
    fn evaluation_is_affine(ineq in levels_ineq(3), b1 in 0u64..256, b2 in 0u64..256, num in 0i64..=7) {
        let s = *ineq.scenario();
        let conv = MarginalConvention::UniformAverage;
        let (x, y) = (Behavior::from_sign_bits(s, b1), Behavior::from_sign_bits(s, b2));
        let alpha = BigRational::new(num.into(), 7.into());
        let mix = x.convex_combination(&alpha, &y).unwrap();
        let lhs = ineq.evaluate(&mix, conv).unwrap();
        let rhs = &alpha * ineq.evaluate(&x, conv).unwrap() + (q(1) - &alpha) * ineq.evaluate(&y, conv).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn canonical_form_is_orbit_invariant(ineq in levels_ineq(4)) {
        let group = SymmetryGroup::default();
        let canon = group.canonicalize(&ineq);
        prop_assert_eq!(&group.canonicalize(&canon), &canon);
        for g in group.elements(ineq.scenario(), false) {
            prop_assert_eq!(&group.canonicalize(&g.apply(&ineq)), &canon);
        }
    }

    #[test]
    fn ns_bound_is_the_l1_norm(ineq in levels_ineq(3)) {
        prop_assert_eq!(nosignaling_bound(&ineq).unwrap(), l1_bound(&ineq));
    }

    #[test]
    fn coarser_models_have_smaller_bounds(ineq in levels_ineq(3)) {
        let s = *ineq.scenario();
        let bound = |h: &str| HybridModel::full_body(s, h.parse::<CardinalityTuple>().unwrap()).unwrap().classical_bound(&ineq).unwrap();
        let (local, hybrid) = (bound("1,1,1"), bound("2,1"));
        prop_assert!(local <= hybrid);
        prop_assert!(hybrid <= l1_bound(&ineq));
    }

    #[test]
    fn facets_ignore_ray_order(
        pts in proptest::collection::vec(proptest::collection::vec(-3i64..=3, 3), 5..9),
        perm_seed in any::<u64>(),
    ) {
        let rays: Vec<Vec<i64>> = pts.iter().map(|p| std::iter::once(1).chain(p.iter().copied()).collect()).collect();
        let Ok(cone) = Cone::new(4, rays.clone()) else { return Err(TestCaseError::reject("zero ray")) };
        let facets = match dd_facets(&cone) {
            Ok(f) => f,
            Err(Error::NotFullDimensional { .. }) => return Err(TestCaseError::reject("flat")),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        let mut shuffled = rays.clone();
        let mut state = perm_seed;
        for i in (1..shuffled.len()).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            shuffled.swap(i, (state >> 33) as usize % (i + 1));
        }
        let again = dd_facets(&Cone::new(4, shuffled).unwrap()).unwrap();
        let a: BTreeSet<Vec<i64>> = facets.iter().map(|f| f.normal.clone()).collect();
        let b: BTreeSet<Vec<i64>> = again.iter().map(|f| f.normal.clone()).collect();
        prop_assert_eq!(&a, &b);
        for f in &a {
            prop_assert!(rays.iter().all(|r| r.iter().zip(f).map(|(x, y)| x * y).sum::<i64>() >= 0));
            prop_assert_eq!(saturation_rank(f, &rays), 3);
        }
    }

    #[test]
    fn square_solve_satisfies_the_system(
        a in proptest::collection::vec(proptest::collection::vec(-5i64..=5, 4), 4),
        b in proptest::collection::vec(-9i64..=9, 4),
    ) {
        let rhs: Vec<BigRational> = b.iter().map(|&x| q(x)).collect();
        if let Some(x) = solve_square(&a, &rhs) {
            for (row, r) in a.iter().zip(&rhs) {
                let lhs: BigRational = row.iter().zip(&x).map(|(c, v)| q(*c) * v).sum();
                prop_assert_eq!(&lhs, r);
            }
        }
    }

    #[test]
    fn float_and_exact_simplex_agree(
        obj in proptest::collection::vec(-5i64..=5, 4),
        rows in proptest::collection::vec((proptest::collection::vec(-4i64..=4, 4), 0i64..=10), 1..6),
    ) {
        let mut lp = LinearProgram::new(obj.iter().map(|&c| q(c)).collect());
        for (r, rhs) in &rows {
            lp.add(r.iter().map(|&c| q(c)).collect(), Relation::Le, q(*rhs));
        }
        lp.bounds = vec![VarBound::range(q(-3), q(3)); 4];
        let exact = simplex_max(&lp).unwrap();
        let float = simplex_max_f64(&lp).unwrap();
        prop_assert!(lp.is_feasible(&exact.x));
        prop_assert_eq!(lp.value(&exact.x), exact.optimum.clone());
        prop_assert!((float.optimum - exact.optimum.to_f64().unwrap()).abs() < 1e-7);
    }

    /// Substituting the rule into the behavior or into the inequality gives
    /// proportional values (the reduced form is rescaled by a positive factor).
    #[test]
    fn reduction_commutes_with_extension(
        coeffs in proptest::collection::vec(-3i64..=3, 10),
        c0 in 1i64..30,
        outputs in proptest::collection::vec(proptest::collection::vec(proptest::collection::vec(any::<bool>(), 2), 3), 2),
        rule_idx in 0usize..3,
    ) {
        let (s1, s2) = (Scenario::new(3, 2).unwrap(), Scenario::new(3, 3).unwrap());
        prop_assume!(coeffs.iter().any(|&c| c != 0));
        let ineq = SymmetricInequality::new(s2, q(c0), multisets(3, 3).into_iter().zip(coeffs.iter().map(|&c| q(c)))).unwrap();
        let rule = ExtensionRule::parse(s1, s2, ["A3=1,B3=1,C3=1", "A3=A1,B3=B1,C3=C1", "A3=-A2,B3=-B2,C3=-C2"][rule_idx]).unwrap();
        let reduced = reduce_inequality(&ineq, &rule).unwrap();
        let conv = MarginalConvention::UniformAverage;
        let vals: Vec<(BigRational, BigRational)> = outputs
            .iter()
            .map(|o| {
                let b1 = local_behavior(s1, o);
                let b2 = extend_behavior(&b1, &rule).unwrap();
                (ineq.evaluate(&b2, conv).unwrap(), reduced.evaluate(&b1, conv).unwrap())
            })
            .collect();
        for (lhs, rhs) in &vals {
            prop_assert_eq!(lhs.is_zero(), rhs.is_zero());
            prop_assert_eq!(lhs > &BigRational::zero(), rhs > &BigRational::zero());
        }
        prop_assert_eq!(&vals[0].0 * &vals[1].1, &vals[1].0 * &vals[0].1);
    }
}
