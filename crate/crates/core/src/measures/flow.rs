use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{Appearance, Measure, MeasureError};
use crate::exact::{Grade, Prob};
use crate::families::{check_ordered_stem, label_stem, CausetRef, DisjointChains, RegularForest};
use crate::poset::ElementId;

type FlowFn = Arc<dyn Fn(ElementId) -> BigRational + Send + Sync>;
type UnlistedFn = Arc<dyn Fn(&[ElementId]) -> f64 + Send + Sync>;

/// Number of stems visited when validating a flow.
pub const VALIDATION_STEMS: usize = 100;

/// An exact flow on an upward-branching forest: `f(x)` equals the sum of
/// `f` over the upper covers of `x`, and the minimal elements carry 1.
#[derive(Clone)]
pub struct FlowSpec {
    name: String,
    f: FlowFn,
    /// Given the listed minimal elements of a truncated answer, a bound on
    /// the flow through the unlisted ones.
    unlisted: Option<UnlistedFn>,
}

impl fmt::Debug for FlowSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FlowSpec({})", self.name)
    }
}

impl FlowSpec {
    pub fn new(name: impl Into<String>, f: impl Fn(ElementId) -> BigRational + Send + Sync + 'static) -> Self {
        Self { name: name.into(), f: Arc::new(f), unlisted: None }
    }

    pub fn with_unlisted(mut self, bound: impl Fn(&[ElementId]) -> f64 + Send + Sync + 'static) -> Self {
        self.unlisted = Some(Arc::new(bound));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn value(&self, x: ElementId) -> BigRational {
        (self.f)(x)
    }

    /// Constant weight per chain on finitely many disjoint chains.
    pub fn chains(chains: DisjointChains, weights: Vec<BigRational>) -> Self {
        let names: Vec<String> = weights.iter().map(ToString::to_string).collect();
        Self::new(format!("chains[{}]", names.join(",")), move |x| {
            weights.get(chains.locate(x).0 as usize).cloned().unwrap_or_else(BigRational::zero)
        })
    }

    /// Chain `c` of countably many chains carries `2^-(c+1)`.
    pub fn countable_chains() -> Self {
        let chains = DisjointChains::new(None);
        let weight = move |c: u64| -> BigRational {
            BigRational::new(BigInt::one(), BigInt::one() << (c + 1))
        };
        Self::new("countable-chains[2^-(c+1)]", move |x| weight(chains.locate(x).0)).with_unlisted(
            move |listed| {
                // Each chain has exactly one minimal element in the complement.
                let seen: HashSet<u64> = listed.iter().map(|&x| chains.locate(x).0).collect();
                let covered: f64 = seen.iter().map(|&c| 0.5f64.powi(c as i32 + 1)).sum();
                (1.0 - covered).max(0.0)
            },
        )
    }

    /// Unit flow split equally among children at every node.
    pub fn equal_split(forest: RegularForest) -> Self {
        let name = format!("equal-split[{}]", crate::families::Causet::descriptor(&forest));
        Self::new(name, move |x| {
            let mut den = BigInt::from(forest.roots());
            for d in 0..forest.depth(x) {
                den *= forest.branching_at(d);
            }
            BigRational::new(BigInt::one(), den)
        })
    }
}

/// `prob(a_1 ... a_k) = f(a_1) ... f(a_k)`.
pub struct FlowMeasure {
    spec: FlowSpec,
    support: CausetRef,
}

/// Build the flow measure after checking the flow identity and the absence
/// of maximal elements on the first [`VALIDATION_STEMS`] stems.
pub fn flow_measure(spec: FlowSpec, support: CausetRef) -> Result<FlowMeasure, MeasureError> {
    let mu = FlowMeasure { spec, support };
    mu.validate(VALIDATION_STEMS)?;
    Ok(mu)
}

/// `μ_q` on two chains: each step takes the next `b` with probability `q`.
pub fn mu_q(q: BigRational) -> Result<FlowMeasure, MeasureError> {
    if q.is_negative() || q > BigRational::one() {
        return Err(MeasureError::InvalidParameter(format!("q = {q} is not in [0, 1]")));
    }
    let chains = DisjointChains::new(Some(2));
    let spec = FlowSpec::chains(chains, vec![q.clone(), BigRational::one() - q.clone()]);
    let spec = FlowSpec { name: format!("mu_q[{q}]"), ..spec };
    flow_measure(spec, Arc::new(chains))
}

impl FlowMeasure {
    pub fn spec(&self) -> &FlowSpec {
        &self.spec
    }

    /// Visit up to `limit` stems breadth-first, checking that the minimal
    /// elements carry total flow 1 and that every chosen element exposes a
    /// new minimal element (so it is not maximal).
    pub fn validate(&self, limit: usize) -> Result<(), MeasureError> {
        let o = self.support.as_ref();
        if o.size().is_some() {
            let last = o.element(o.size().unwrap_or(1).saturating_sub(1)).unwrap_or(ElementId(0));
            return Err(MeasureError::HasMaximalElement(o.label(last)));
        }
        let budget = crate::families::DEFAULT_LIST_BUDGET;
        let mut seen: HashSet<BTreeSet<ElementId>> = HashSet::new();
        let mut queue: VecDeque<Vec<ElementId>> = VecDeque::from([Vec::new()]);
        while let Some(stem) = queue.pop_front() {
            if seen.len() >= limit {
                break;
            }
            if !seen.insert(stem.iter().copied().collect()) {
                continue;
            }
            let m = o.minimal_after(&stem, budget);
            if m.exhaustive {
                let sum: BigRational = m.elems.iter().map(|&x| self.spec.value(x)).sum();
                if !sum.is_one() {
                    return Err(MeasureError::FlowViolation {
                        stem: label_stem(o, &stem),
                        sum: sum.to_string(),
                    });
                }
            }
            for &x in &m.elems {
                let mut next = stem.clone();
                next.push(x);
                let after = o.minimal_after(&next, budget);
                let exposed = after.elems.iter().any(|y| !m.elems.contains(y));
                if m.exhaustive && after.exhaustive && !exposed {
                    return Err(MeasureError::HasMaximalElement(o.label(x)));
                }
                queue.push_back(next);
            }
        }
        Ok(())
    }
}

impl Measure for FlowMeasure {
    fn name(&self) -> String {
        format!("flow({})", self.spec.name)
    }

    fn support(&self) -> &CausetRef {
        &self.support
    }

    fn grade(&self) -> Grade {
        Grade::ExactRational
    }

    fn weight(&self, _stem: &[ElementId], x: ElementId) -> Result<Prob, MeasureError> {
        Ok(Prob::rational(self.spec.value(x)))
    }

    fn prob(&self, stem: &[ElementId]) -> Result<Prob, MeasureError> {
        check_ordered_stem(self.support.as_ref(), stem)?;
        let (mut num, mut den) = (BigInt::one(), BigInt::one());
        for &x in stem {
            let f = self.spec.value(x);
            if f.is_zero() {
                return Ok(Prob::zero());
            }
            num *= f.numer();
            den *= f.denom();
        }
        Ok(Prob::rational(BigRational::new(num, den)))
    }

    fn unlisted_mass(&self, _stem: &[ElementId], listed: &[ElementId]) -> Option<f64> {
        self.spec.unlisted.as_ref().map(|u| u(listed))
    }

    /// On a forest the weight of a minimal element never changes until it is
    /// chosen, so an element with positive flow is chosen almost surely.
    fn appearance(&self, x: ElementId) -> Appearance {
        if self.spec.value(x).is_positive() {
            Appearance::Sure
        } else {
            Appearance::Never
        }
    }
}

#[cfg(test)]
pub(crate) fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(num.into(), den.into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{parse_stem, Causet, ChainPlusPoint};

    fn stem(o: &dyn Causet, s: &str) -> Vec<ElementId> {
        parse_stem(o, &s.split_whitespace().collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn product_form_on_two_chains() {
        let chains = DisjointChains::new(Some(2));
        let spec = FlowSpec::chains(chains, vec![ratio(3, 10), ratio(7, 10)]);
        let mu = flow_measure(spec, Arc::new(chains)).unwrap();
        let p = mu.prob(&stem(&chains, "b1 c1 c2")).unwrap();
        assert_eq!(p, Prob::ratio(147, 1000));
    }

    #[test]
    fn single_chain_is_deterministic() {
        let f = RegularForest::single_chain();
        let mu = flow_measure(FlowSpec::equal_split(f.clone()), Arc::new(f)).unwrap();
        let s: Vec<ElementId> = (0..6).map(ElementId).collect();
        assert_eq!(mu.prob(&s).unwrap(), Prob::one());
    }

    #[test]
    fn half_reproduces_mu_q() {
        let mu = mu_q(ratio(1, 2)).unwrap();
        let o = mu.support().clone();
        assert_eq!(mu.prob(&stem(o.as_ref(), "b1 c1")).unwrap(), Prob::ratio(1, 4));
    }

    #[test]
    fn bad_flow_is_rejected() {
        let chains = DisjointChains::new(Some(2));
        let spec = FlowSpec::chains(chains, vec![ratio(1, 2), ratio(1, 3)]);
        assert!(matches!(flow_measure(spec, Arc::new(chains)), Err(MeasureError::FlowViolation { .. })));
    }

    #[test]
    fn maximal_elements_are_rejected() {
        let f = RegularForest::new(1, vec![2, 0]);
        let r = flow_measure(FlowSpec::equal_split(f.clone()), Arc::new(f));
        assert!(matches!(r, Err(MeasureError::HasMaximalElement(_))));
        let spec = FlowSpec::new("point", |_| BigRational::one());
        let r = flow_measure(spec, Arc::new(ChainPlusPoint));
        assert!(r.is_err());
    }

    #[test]
    fn countable_chains_bound_unlisted_mass() {
        let mu = flow_measure(FlowSpec::countable_chains(), Arc::new(DisjointChains::new(None))).unwrap();
        let t = mu.transition(&[], 10).unwrap();
        assert!(!t.exhaustive);
        let listed = t.total().to_f64();
        assert!((1.0 - listed - t.slack).abs() < 1e-12);
    }

    #[test]
    fn binary_tree_split_is_valid() {
        let f = RegularForest::binary_tree();
        let mu = flow_measure(FlowSpec::equal_split(f.clone()), Arc::new(f)).unwrap();
        let t = mu.transition(&[ElementId(0)], 8).unwrap();
        assert_eq!(t.total(), Prob::one());
        assert_eq!(mu.appearance(ElementId(5)), Appearance::Sure);
    }
}
