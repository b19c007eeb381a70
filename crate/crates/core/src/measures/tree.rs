//! The order-invariant measure on a downward-branching tree.
//!
//! For a minimal element `x` of `T∖A`, follow the chain `u_0 = x < u_1 < ...`
//! of elements above it. Each step contributes the factor
//! `|D[u_{j-1}]| / |D(u_j)|` (down-sets taken in `T∖A`), that is `1 - t_j(x)`,
//! and `p_{T∖A}(x)` is the product of all factors. Along the reference chain
//! the factors differ from 1 only at levels with a pendant, so the product is
//! finite when finitely many pendants exist and otherwise is truncated using
//! the rule's tail bound.

use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Measure, MeasureError, Transition};
use crate::exact::{Grade, Prob};
use crate::families::tree::{Node, TailBound};
use crate::families::{Causet, CausetRef, DownTree, TreeSpec};
use crate::poset::{ElementId, PosetError, UniformSampler};

/// Most pendant levels multiplied into one truncated product.
pub const MAX_LEVELS: usize = 1_000_000;

/// Tail mass ignored by the marking sampler.
pub const SAMPLER_TAIL: f64 = 1e-12;

/// Chain steps reported per minimal element in `t_sequences`.
const REPORTED_STEPS: usize = 32;

/// The stem `A` in level coordinates.
struct Removed {
    /// `x_0 .. x_{chain-1}` are in `A`.
    chain: u64,
    /// Removed pendant elements per level.
    pendant: BTreeMap<u64, HashSet<usize>>,
    size: u64,
}

impl Removed {
    fn new(tree: &DownTree, stem: &[ElementId]) -> Self {
        let mut chain = 0;
        let mut pendant: BTreeMap<u64, HashSet<usize>> = BTreeMap::new();
        for &x in stem {
            match tree.locate(x) {
                Node::Chain(_) => chain += 1,
                Node::Pendant(i, e) => {
                    pendant.entry(i).or_default().insert(e);
                }
            }
        }
        Self { chain, pendant, size: stem.len() as u64 }
    }

    /// Highest level holding an element of `A`.
    fn top_level(&self) -> u64 {
        let p = self.pendant.keys().next_back().copied().unwrap_or(0);
        p.max(self.chain.saturating_sub(1))
    }

    fn removed_upto(&self, level: u64) -> u64 {
        let pendant: usize = self.pendant.range(..=level).map(|(_, s)| s.len()).sum();
        (level + 1).min(self.chain) + pendant as u64
    }

    fn removed_at(&self, level: u64) -> u64 {
        self.pendant.get(&level).map_or(0, |s| s.len() as u64)
    }

    fn has(&self, level: u64, e: usize) -> bool {
        self.pendant.get(&level).is_some_and(|s| s.contains(&e))
    }
}

fn level_of(node: Node) -> u64 {
    match node {
        Node::Chain(i) | Node::Pendant(i, _) => i,
    }
}

fn frac(num: u64, den: u64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Where the truncated product stops and what it neglects.
struct Cutoff {
    /// Last level multiplied in; `None` means every nonempty level.
    level: Option<u64>,
    /// Bound on the relative error of the truncated product.
    error: f64,
}

pub struct TreeMeasure {
    tree: Arc<DownTree>,
    support: CausetRef,
    tol: f64,
    tail: TailBound,
}

impl TreeMeasure {
    pub fn tree(&self) -> &DownTree {
        &self.tree
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// `|D[x_j] ∖ A|`.
    fn chain_closed(&self, r: &Removed, j: u64) -> u64 {
        j + 1 + self.tree.size_upto(j) - r.removed_upto(j)
    }

    /// `|A_i ∖ A|`.
    fn pendant_left(&self, r: &Removed, i: u64) -> u64 {
        self.tree.a(i) - r.removed_at(i)
    }

    /// Chain step into `x_j`: `|D[x_{j-1}]∖A| / |D(x_j)∖A|`.
    fn chain_factor(&self, r: &Removed, j: u64) -> BigRational {
        let below = self.chain_closed(r, j - 1);
        frac(below, below + self.pendant_left(r, j))
    }

    /// Factors from `x` up to its level on the reference chain.
    fn climb(&self, r: &Removed, x: ElementId) -> (u64, Vec<(ElementId, BigRational)>) {
        match self.tree.locate(x) {
            Node::Chain(m) => (m, Vec::new()),
            Node::Pendant(i, e) => {
                let p = self.tree.pendant(i).expect("pendant element exists");
                let closed = |v: usize| 1 + p.below(v).into_iter().filter(|&u| !r.has(i, u)).count() as u64;
                let mut steps = Vec::new();
                let mut u = e;
                while let Some(par) = p.parent(u) {
                    steps.push((self.tree.pendant_id(i, par), frac(closed(u), closed(par) - 1)));
                    u = par;
                }
                let top = self.chain_closed(r, i - 1) + self.pendant_left(r, i);
                steps.push((self.tree.chain_id(i), frac(closed(u), top)));
                (i, steps)
            }
        }
    }

    fn cutoff(&self, r: &Removed, start: u64) -> Result<Cutoff, MeasureError> {
        match &self.tail {
            TailBound::FiniteSupport => Ok(Cutoff { level: None, error: 0.0 }),
            TailBound::Bound(f) => {
                let mut j = (2 * r.size).max(r.top_level()).max(start).max(1);
                while 2.0 * f(j) > self.tol {
                    j = j.checked_mul(2).ok_or(MeasureError::TailUnbounded)?;
                }
                Ok(Cutoff { level: Some(j), error: 2.0 * f(j) })
            }
            TailBound::Divergent => Err(MeasureError::TailUnbounded),
        }
    }

    /// Chain factors for nonempty levels in `(start, stop]`.
    fn chain_product(&self, r: &Removed, start: u64, stop: Option<u64>) -> Result<BigRational, MeasureError> {
        let rule = self.tree.spec().rule();
        let mut prod = BigRational::one();
        let mut level = start;
        let mut count = 0usize;
        while let Some(j) = rule.next_nonempty(level) {
            if stop.is_some_and(|s| j > s) {
                break;
            }
            count += 1;
            if count > MAX_LEVELS {
                return Err(PosetError::ResourceLimit { budget: MAX_LEVELS }.into());
            }
            prod *= self.chain_factor(r, j);
            level = j;
        }
        Ok(prod)
    }

    /// p_{T∖A}(x) before truncation error, with the relative error bound.
    fn law(&self, stem: &[ElementId], x: ElementId) -> Result<(BigRational, f64), MeasureError> {
        let r = Removed::new(&self.tree, stem);
        let (start, steps) = self.climb(&r, x);
        let cut = self.cutoff(&r, start)?;
        let mut prod = self.chain_product(&r, start, cut.level)?;
        for (_, f) in steps {
            prod *= f;
        }
        Ok((prod, cut.error))
    }

    /// Exact first-element law of `D[x_level] ∖ A`: the products truncated
    /// at `level`, over the minimal elements at or below that level. The
    /// values sum to 1.
    pub fn truncated_law(&self, stem: &[ElementId], level: u64) -> Result<Vec<(ElementId, BigRational)>, MeasureError> {
        let r = Removed::new(&self.tree, stem);
        let mut out = Vec::new();
        for x in self.minimal_upto(stem, level) {
            let (start, steps) = self.climb(&r, x);
            let mut prod = self.chain_product(&r, start, Some(level))?;
            for (_, f) in steps {
                prod *= f;
            }
            out.push((x, prod));
        }
        Ok(out)
    }

    /// Minimal elements of `T∖A` whose level is at most `level`.
    fn minimal_upto(&self, stem: &[ElementId], level: u64) -> Vec<ElementId> {
        let mut budget = 16;
        loop {
            let m = self.tree.minimal_after(stem, budget);
            let deep = m.elems.last().is_some_and(|&y| level_of(self.tree.locate(y)) > level);
            if m.exhaustive || deep {
                return m.elems.into_iter().filter(|&y| level_of(self.tree.locate(y)) <= level).collect();
            }
            budget *= 2;
        }
    }

    /// The `t_j(x)` of the nontrivial steps above `x`, for `A = ∅`.
    fn t_sequence(&self, x: ElementId) -> Result<Vec<(ElementId, BigRational)>, MeasureError> {
        let r = Removed::new(&self.tree, &[]);
        let (start, steps) = self.climb(&r, x);
        let mut out: Vec<(ElementId, BigRational)> =
            steps.into_iter().map(|(u, f)| (u, BigRational::one() - f)).collect();
        let rule = self.tree.spec().rule();
        let mut level = start;
        while let Some(j) = rule.next_nonempty(level) {
            if out.len() >= REPORTED_STEPS {
                break;
            }
            out.push((self.tree.chain_id(j), BigRational::one() - self.chain_factor(&r, j)));
            level = j;
        }
        Ok(out)
    }
}

impl Measure for TreeMeasure {
    fn name(&self) -> String {
        format!("tree({})", self.tree.spec().name())
    }

    fn support(&self) -> &CausetRef {
        &self.support
    }

    fn grade(&self) -> Grade {
        match self.tail {
            TailBound::FiniteSupport => Grade::ExactRational,
            _ => Grade::Float,
        }
    }

    fn weight(&self, stem: &[ElementId], x: ElementId) -> Result<Prob, MeasureError> {
        let (p, error) = self.law(stem, x)?;
        Ok(if error == 0.0 { Prob::rational(p) } else { Prob::Float(p.to_f64().unwrap_or(f64::NAN)) })
    }

    fn weight_error(&self) -> f64 {
        match self.tail {
            TailBound::FiniteSupport => 0.0,
            _ => self.tol,
        }
    }

    /// Lists minimal elements at least up to level `2|A|` so the tail bound
    /// applies to everything left out.
    fn transition(&self, stem: &[ElementId], budget: usize) -> Result<Transition, MeasureError> {
        let r = Removed::new(&self.tree, stem);
        let floor = (2 * r.size).max(r.top_level()).max(1);
        let mut b = budget.max(1);
        let m = loop {
            let m = self.tree.minimal_after(stem, b);
            let last = m.elems.last().map_or(0, |&y| level_of(self.tree.locate(y)));
            if m.exhaustive || last > floor {
                break m;
            }
            b *= 2;
        };
        let weights = m
            .elems
            .iter()
            .map(|&x| Ok((x, self.weight(stem, x)?)))
            .collect::<Result<Vec<_>, MeasureError>>()?;
        let mut slack = weights.len() as f64 * self.weight_error();
        if !m.exhaustive {
            let TailBound::Bound(f) = &self.tail else { return Err(MeasureError::TailUnbounded) };
            // Unlisted minima sit at levels >= L; their mass is at most
            // the sum of t'_j over j >= L, and t'_j <= 2 t_j there.
            let last = m.elems.last().map_or(1, |&y| level_of(self.tree.locate(y)));
            slack += 2.0 * f(last.saturating_sub(1));
        }
        Ok(Transition { weights, exhaustive: m.exhaustive, slack })
    }
}

pub struct TreeMeasureResult {
    pub exists: bool,
    /// Bound on `sum_{i > J} t_i` at the truncation level used for `tol`;
    /// zero for finitely many pendants and infinite when divergent.
    pub tail_sum_bound: f64,
    pub measure: Option<TreeMeasure>,
    /// For each minimal element of `T`, `t_j` at the nontrivial steps above
    /// it, keyed by the upper element of the step.
    pub t_sequences: Vec<(ElementId, Vec<(ElementId, BigRational)>)>,
}

/// Decide existence from the rule's tail information and build the measure.
pub fn tree_measure(spec: TreeSpec, tol: f64) -> Result<TreeMeasureResult, MeasureError> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(MeasureError::InvalidParameter(format!("tolerance {tol} must be positive")));
    }
    let tail = spec.rule().tail().ok_or(MeasureError::TailUnbounded)?;
    let tree = Arc::new(DownTree::new(spec));
    let tail_sum_bound = match &tail {
        TailBound::FiniteSupport => 0.0,
        TailBound::Divergent => f64::INFINITY,
        TailBound::Bound(f) => {
            let mut j = 1u64;
            while 2.0 * f(j) > tol {
                j = j.checked_mul(2).ok_or(MeasureError::TailUnbounded)?;
            }
            f(j)
        }
    };
    let exists = !matches!(tail, TailBound::Divergent);
    let mu = TreeMeasure { support: tree.clone(), tree, tol, tail };
    let mut t_sequences = Vec::new();
    for x in mu.tree.minimal_after(&[], REPORTED_STEPS).elems {
        t_sequences.push((x, mu.t_sequence(x)?));
    }
    Ok(TreeMeasureResult { exists, tail_sum_bound, measure: exists.then_some(mu), t_sequences })
}

/// First element of the marking construction: mark each pendant `A_i` with
/// probability `t_i`; if any is marked, return the bottom of a uniform
/// linear extension of the last marked pendant, else `x_0`.
///
/// Levels past the point where the tail bound drops below
/// [`SAMPLER_TAIL`] are not examined.
pub fn tree_marking_sampler(spec: &TreeSpec, seed: u64) -> Result<ElementId, MeasureError> {
    let horizon = match spec.rule().tail().ok_or(MeasureError::TailUnbounded)? {
        TailBound::FiniteSupport => None,
        TailBound::Bound(f) => {
            let mut j = 1u64;
            while f(j) > SAMPLER_TAIL {
                j = j.checked_mul(2).ok_or(MeasureError::TailUnbounded)?;
            }
            Some(j)
        }
        TailBound::Divergent => return Err(MeasureError::TailUnbounded),
    };
    let tree = DownTree::new(spec.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut marked = None;
    let mut level = 0;
    while let Some(i) = spec.rule().next_nonempty(level) {
        if horizon.is_some_and(|h| i > h) {
            break;
        }
        let t = tree.a(i) as f64 / tree.chain_down_size(i) as f64;
        if rng.random::<f64>() < t {
            marked = Some(i);
        }
        level = i;
    }
    let Some(k) = marked else { return Ok(tree.chain_id(0)) };
    let poset = tree.pendant(k).expect("marked pendants are nonempty").poset();
    let ext = UniformSampler::new(&poset)?.sample(&mut rng);
    Ok(tree.pendant_id(k, ext[0].0 as usize))
}

/// `sum t_i` over nonempty levels up to `level`, for reports.
pub fn t_partial_sum(tree: &DownTree, level: u64) -> f64 {
    let rule = tree.spec().rule();
    let mut acc = 0.0;
    let mut l = 0;
    while let Some(i) = rule.next_nonempty(l) {
        if i > level {
            break;
        }
        acc += tree.a(i) as f64 / tree.chain_down_size(i) as f64;
        l = i;
    }
    acc
}

impl TreeMeasureResult {
    pub fn is_zero_free(&self) -> bool {
        self.t_sequences.iter().all(|(_, ts)| ts.iter().all(|(_, t)| !t.is_zero()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::tree::Pendant;
    use crate::families::{parse_stem, restrict_down_set};
    use crate::poset::enumerate_extensions;

    fn measure(spec: TreeSpec) -> TreeMeasure {
        tree_measure(spec, 1e-12).unwrap().measure.unwrap()
    }

    fn el(mu: &TreeMeasure, s: &str) -> ElementId {
        mu.tree().parse_label(s).unwrap()
    }

    #[test]
    fn every_level_has_no_measure() {
        let r = tree_measure(TreeSpec::every_level(Pendant::leaf()), 1e-9).unwrap();
        assert!(!r.exists);
        assert!(r.measure.is_none());
        let t = &r.t_sequences[0].1;
        assert_eq!(t[0].1, frac(1, 2));
        assert_eq!(t[1].1, frac(1, 4));
    }

    #[test]
    fn single_pendant_is_fair() {
        let mu = measure(TreeSpec::leaves_at(&[1]));
        assert_eq!(mu.weight(&[], el(&mu, "x0")).unwrap(), Prob::ratio(1, 2));
        assert_eq!(mu.weight(&[], el(&mu, "y1")).unwrap(), Prob::ratio(1, 2));
    }

    #[test]
    fn two_pendants() {
        let mu = measure(TreeSpec::leaves_at(&[1, 2]));
        assert_eq!(mu.weight(&[], el(&mu, "x0")).unwrap(), Prob::ratio(3, 8));
        assert_eq!(mu.weight(&[], el(&mu, "y1")).unwrap(), Prob::ratio(3, 8));
        assert_eq!(mu.weight(&[], el(&mu, "y2")).unwrap(), Prob::ratio(1, 4));
        let t = mu.transition(&[], 8).unwrap();
        assert!(t.exhaustive);
        assert_eq!(t.total(), Prob::one());
    }

    #[test]
    fn matches_enumeration_of_the_down_set() {
        let mu = measure(TreeSpec::leaves_at(&[1, 2]));
        let x2 = el(&mu, "x2");
        let mut members = mu.tree().down(x2);
        members.push(x2);
        let p = restrict_down_set(mu.tree(), &members).unwrap();
        let all = enumerate_extensions(&p, 100).unwrap();
        let x0 = el(&mu, "x0");
        let starts = all.iter().filter(|e| e[0] == x0).count();
        assert_eq!((starts, all.len()), (3, 8));
    }

    #[test]
    fn truncated_law_sums_to_one() {
        let spec = TreeSpec::listed(BTreeMap::from([
            (1, Pendant::chain(2)),
            (2, Pendant::new(vec![Some(2), Some(2), None]).unwrap()),
            (4, Pendant::leaf()),
        ]));
        let mu = measure(spec);
        let stems: [&[&str]; 3] = [&[], &["x0"], &["y1_1", "x0"]];
        for s in stems {
            let stem = parse_stem(mu.tree(), s).unwrap();
            for level in 1..6 {
                let law = mu.truncated_law(&stem, level).unwrap();
                let total: BigRational = law.iter().map(|(_, p)| p.clone()).sum();
                assert!(total.is_one(), "{s:?} at {level}");
            }
        }
    }

    #[test]
    fn pairwise_invariance_exact() {
        let mu = measure(TreeSpec::leaves_at(&[1, 2]));
        let (x0, y1, y2) = (el(&mu, "x0"), el(&mu, "y1"), el(&mu, "y2"));
        for (a, b) in [(x0, y1), (x0, y2), (y1, y2)] {
            assert_eq!(mu.prob(&[a, b]).unwrap(), mu.prob(&[b, a]).unwrap());
        }
    }

    #[test]
    fn powers_of_two_are_float_and_balanced() {
        let mu = measure(TreeSpec::powers_of_two(Pendant::leaf()));
        let t = mu.transition(&[], 4).unwrap();
        assert!(!t.exhaustive);
        assert!((t.total().to_f64() - 1.0).abs() <= t.slack);
        let (x0, y1) = (el(&mu, "x0"), el(&mu, "y1"));
        let a = mu.prob(&[x0, y1]).unwrap().to_f64();
        let b = mu.prob(&[y1, x0]).unwrap().to_f64();
        assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn rules_without_tail_are_refused() {
        struct Mystery(Pendant);
        impl crate::families::tree::PendantRule for Mystery {
            fn name(&self) -> String {
                "mystery".into()
            }
            fn pendant(&self, level: u64) -> Option<&Pendant> {
                level.is_multiple_of(3).then_some(&self.0)
            }
            fn next_nonempty(&self, after: u64) -> Option<u64> {
                Some((after / 3 + 1) * 3)
            }
            fn size_upto(&self, level: u64) -> u64 {
                level / 3
            }
        }
        let spec = TreeSpec::with_rule(Arc::new(Mystery(Pendant::leaf())));
        assert!(matches!(tree_measure(spec.clone(), 1e-9), Err(MeasureError::TailUnbounded)));
        assert!(matches!(tree_marking_sampler(&spec, 1), Err(MeasureError::TailUnbounded)));
    }

    #[test]
    fn bare_chain_sampler_returns_bottom() {
        for seed in 0..20 {
            assert_eq!(tree_marking_sampler(&TreeSpec::bare_chain(), seed).unwrap(), ElementId(0));
        }
    }
}
