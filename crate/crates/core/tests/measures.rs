use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;

use causet::analysis::{check_kolmogorov, check_order_invariance, check_order_markov, InvarianceMode};
use causet::exact::{Grade, Prob};
use causet::families::{parse_stem, restrict_down_set, DownTree, LinearSum, TreeSpec};
use causet::measures::{
    condition_on_appearance, derived_stem_measure, mixture_measure, mu_q, tree_measure, LadderMeasure, Measure,
    MeasureRef, StackedUniform, UrnMeasure,
};
use causet::poset::{enumerate_extensions, shapes, ElementId};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[test]
fn derived_measure_of_urn_is_shifted_urn() {
    let urn: MeasureRef = Arc::new(UrnMeasure::new());
    let o = urn.support().clone();
    let b1 = parse_stem(o.as_ref(), &["b1"]).unwrap();
    let derived = derived_stem_measure(urn.clone(), &b1).unwrap();
    // After one b the urn holds two b and one c: next b with probability 2/3.
    let b2 = parse_stem(o.as_ref(), &["b2"]).unwrap();
    assert_eq!(derived.prob(&b2).unwrap(), Prob::ratio(2, 3));
    assert!(check_kolmogorov(&derived, 5).unwrap().passed);
    assert!(check_order_invariance(&derived, 5, InvarianceMode::Full).unwrap().passed);
}

#[test]
fn conditioning_a_mixture_recovers_components() {
    let q = |n, d| -> MeasureRef { Arc::new(mu_q(rat(n, d)).unwrap()) };
    // μ_0 never picks a b; μ_1 always does.
    let mix: MeasureRef = Arc::new(mixture_measure(vec![(q(0, 1), Prob::ratio(1, 4)), (q(1, 1), Prob::ratio(3, 4))]).unwrap());
    let b1 = mix.support().parse_label("b1").unwrap();
    let split = condition_on_appearance(mix, b1, 20).unwrap();
    let plus = split.plus.expect("b1 appears with probability 3/4");
    let minus = split.minus.expect("b1 is absent with probability 1/4");
    assert_eq!(plus.prob(&[b1]).unwrap(), Prob::one());
    let c1 = minus.support().parse_label("c1").unwrap();
    assert_eq!(minus.prob(&[c1]).unwrap(), Prob::one());
}

#[test]
fn stacked_uniform_is_order_markov() {
    let sum = LinearSum::new(vec![shapes::antichain(2), shapes::ladder(3)]);
    let mu = StackedUniform::new(sum, 2).unwrap();
    assert!(check_kolmogorov(&mu, 6).unwrap().passed);
    assert!(check_order_invariance(&mu, 5, InvarianceMode::Full).unwrap().passed);
    assert!(check_order_markov(&mu, 5).unwrap().passed);
}

#[test]
fn ladder_measure_is_exact_quadratic_and_consistent() {
    let mu = LadderMeasure::new();
    assert_eq!(mu.grade(), Grade::ExactQuadratic);
    let k = check_kolmogorov(&mu, 8).unwrap();
    assert!(k.passed && k.residual.is_zero());
}

#[test]
fn tree_law_matches_enumeration_of_a_finite_truncation() {
    // Pendants at 1, 2 and 4: beyond x_4 the tree is a chain, so the law of
    // the first element is that of the uniform extension of D[x_4].
    let spec = TreeSpec::leaves_at(&[1, 2, 4]);
    let tree = DownTree::new(spec.clone());
    let mu = tree_measure(spec, 1e-12).unwrap().measure.unwrap();
    let x4 = tree.chain_id(4);
    let mut d = causet::families::Causet::down(&tree, x4);
    d.push(x4);
    let all = enumerate_extensions(&restrict_down_set(&tree, &d).unwrap(), 1 << 20).unwrap();
    let t = mu.transition(&[], 16).unwrap();
    let mut total = Prob::zero();
    for (x, p) in &t.weights {
        let hits = all.iter().filter(|e| e[0] == *x).count() as i64;
        assert_eq!(*p, Prob::rational(rat(hits, all.len() as i64)), "first element {x:?}");
        total = total.add(p);
    }
    assert_eq!(total, Prob::one());
    let first: Vec<ElementId> = all.iter().map(|e| e[0]).collect();
    assert!(first.iter().all(|x| t.weight_of(*x).is_some()));
}
