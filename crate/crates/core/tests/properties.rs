use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use causet::analysis::{check_kolmogorov, check_order_invariance, InvarianceMode};
use causet::exact::{Prob, Surd5, ValueRecord};
use causet::families::{restrict_down_set, Grid};
use causet::measures::grid::{cells_of, hook_count};
use causet::measures::{grid_finite_nu, mu_q, Measure, UniformFinite};
use causet::poset::{enumerate_extensions, sample_uniform_extension, ElementId, FinitePoset};

fn poset_strategy(max: u64) -> impl Strategy<Value = FinitePoset> {
    (1..=max).prop_flat_map(|n| {
        let pairs = (n * n.saturating_sub(1) / 2) as usize;
        proptest::collection::vec(proptest::bool::weighted(0.35), pairs).prop_map(move |bits| {
            let mut covers = Vec::new();
            let mut k = 0;
            for i in 0..n {
                for j in i + 1..n {
                    if bits[k] {
                        covers.push((ElementId(i), ElementId(j)));
                    }
                    k += 1;
                }
            }
            let ids: Vec<ElementId> = (0..n).map(ElementId).collect();
            FinitePoset::new(&ids, &covers).unwrap()
        })
    })
}

fn partition_strategy() -> impl Strategy<Value = Vec<u64>> {
    proptest::collection::vec(1u64..=4, 1..=4).prop_map(|mut rows| {
        rows.sort_unstable_by(|a, b| b.cmp(a));
        rows
    })
}

fn surd_strategy() -> impl Strategy<Value = Surd5> {
    (-20i64..=20, 1i64..=9, -20i64..=20, 1i64..=9).prop_map(|(a, b, c, d)| {
        Surd5::new(BigRational::new(a.into(), b.into()), BigRational::new(c.into(), d.into()))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn count_matches_enumeration(p in poset_strategy(7)) {
        let listed = enumerate_extensions(&p, 10_000).unwrap();
        prop_assert_eq!(p.count_linear_extensions().unwrap(), BigUint::from(listed.len()));
        for e in &listed {
            prop_assert!(p.is_ordered_stem(e));
        }
    }

    #[test]
    fn next_element_probabilities_sum_to_one(p in poset_strategy(7), seed in any::<u64>(), cut in 0usize..7) {
        let ext = sample_uniform_extension(&p, seed).unwrap();
        prop_assert!(p.is_ordered_stem(&ext));
        let prefix = &ext[..cut.min(ext.len().saturating_sub(1))];
        let base = p.nu_uniform(prefix).unwrap();
        let a = p.down_set(prefix).unwrap();
        let mut total = BigRational::zero();
        for x in p.minimal_after(&a).unwrap() {
            let mut s = prefix.to_vec();
            s.push(x);
            total += p.nu_uniform(&s).unwrap();
        }
        prop_assert_eq!(total, base);
    }

    #[test]
    fn prefix_count_is_count_of_remainder(p in poset_strategy(7), seed in any::<u64>(), cut in 0usize..7) {
        let ext = sample_uniform_extension(&p, seed).unwrap();
        let prefix = &ext[..cut.min(ext.len())];
        let rest = p.without(prefix).unwrap();
        prop_assert_eq!(p.count_with_prefix(prefix).unwrap(), rest.count_linear_extensions().unwrap());
    }

    #[test]
    fn rank_distribution_is_a_law(p in poset_strategy(7)) {
        let x = *p.elements().last().unwrap();
        let d = p.rank_distribution(x).unwrap();
        let total: BigRational = d.iter().cloned().sum();
        prop_assert!(total.is_one());
        // The last id is maximal by construction, so the profile climbs.
        prop_assert!(d.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn uniform_finite_is_order_invariant(p in poset_strategy(5)) {
        let mu = UniformFinite::new(p, "random").unwrap();
        prop_assert!(check_kolmogorov(&mu, 5).unwrap().passed);
        prop_assert!(check_order_invariance(&mu, 5, InvarianceMode::Full).unwrap().passed);
    }

    #[test]
    fn hook_formula_matches_dp(shape in partition_strategy()) {
        let dp = restrict_down_set(&Grid, &cells_of(&shape)).unwrap().count_linear_extensions().unwrap();
        prop_assert_eq!(hook_count(&shape), dp);
    }

    #[test]
    fn grid_values_match_dp(shape in partition_strategy(), seed in any::<u64>(), cut in 0usize..6) {
        let cells = cells_of(&shape);
        let p = restrict_down_set(&Grid, &cells).unwrap();
        let ext = sample_uniform_extension(&p, seed).unwrap();
        let stem = &ext[..cut.min(ext.len())];
        prop_assert_eq!(grid_finite_nu(&cells, stem).unwrap(), p.nu_uniform(stem).unwrap());
    }

    #[test]
    fn surd_field_laws(a in surd_strategy(), b in surd_strategy(), c in surd_strategy()) {
        prop_assert_eq!((a.clone() + b.clone()) - b.clone(), a.clone());
        prop_assert_eq!(a.clone() * (b.clone() + c.clone()), a.clone() * b.clone() + a.clone() * c.clone());
        prop_assert_eq!((a.clone() * b.clone()).conjugate(), a.conjugate() * b.conjugate());
        if !b.is_zero() {
            prop_assert_eq!(a.checked_div(&b).unwrap() * b.clone(), a.clone());
        }
        let (p, q, r) = a.to_triple();
        prop_assert_eq!(Surd5::from_triple(p, q, r).unwrap(), a.clone());
        prop_assert_eq!(a.signum(), a.to_f64().partial_cmp(&0.0).unwrap());
    }

    #[test]
    fn value_records_round_trip(a in surd_strategy()) {
        let p = Prob::Exact(a);
        let rec = ValueRecord::from_prob(&p);
        let json = serde_json::to_string(&rec).unwrap();
        let back: ValueRecord = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back.to_prob().unwrap(), p);
    }

    #[test]
    fn mu_q_is_consistent(num in 0i64..=8) {
        let q = BigRational::new(BigInt::from(num), BigInt::from(8));
        let mu = mu_q(q.clone()).unwrap();
        prop_assert!(check_kolmogorov(&mu, 6).unwrap().passed);
        let b: Vec<ElementId> = (0..4).map(|i| mu.support().parse_label(&format!("b{}", i + 1)).unwrap()).collect();
        let want = num_traits::pow(q, 4);
        prop_assert_eq!(mu.prob(&b).unwrap(), Prob::rational(want));
    }
}

#[test]
fn mixture_of_flows_keeps_invariance() {
    use causet::measures::{mixture_measure, MeasureRef};
    let part = |n: i64| -> MeasureRef { Arc::new(mu_q(BigRational::new(n.into(), 5.into())).unwrap()) };
    let mix = mixture_measure(vec![(part(1), Prob::ratio(1, 3)), (part(3), Prob::ratio(2, 3))]).unwrap();
    assert!(check_kolmogorov(&mix, 6).unwrap().passed);
    assert!(check_order_invariance(&mix, 5, InvarianceMode::Full).unwrap().passed);
}
