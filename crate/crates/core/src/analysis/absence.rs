use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::stems::{down_sets, DEFAULT_STEM_BUDGET};
use super::{AnalysisError, CheckReport, Table, Tally};
use crate::exact::{Grade, Prob};
use crate::families::{label_stem, restrict_down_set, Causet, CrossedChains};
use crate::poset::{ElementId, FinitePoset};

/// Elements scanned for something above `x` before `x` is treated as
/// maximal in an infinite family.
const MAXIMALITY_SCAN: u64 = 10_000;

fn frac(num: u64, den: u64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn positive_part(r: BigRational) -> Prob {
    Prob::rational(if r.is_positive() { r } else { BigRational::zero() })
}

/// Whether a position distribution `r_1, ..., r_n` is non-decreasing.
/// Works on any distribution, so it also serves as its own negative control.
pub fn rank_profile_report(dist: &[BigRational], what: &str) -> CheckReport {
    let mut tally = Tally::new("rank-monotonicity", dist.len(), Grade::ExactRational);
    for (i, w) in dist.windows(2).enumerate() {
        tally.observe(positive_part(&w[0] - &w[1]), || format!("{what}: r_{} = {} > r_{} = {}", i + 1, w[0], i + 2, w[1]));
    }
    let mut report = tally.finish();
    report.table = Some(Table {
        columns: vec!["i".into(), "num".into(), "den".into()],
        rows: dist
            .iter()
            .enumerate()
            .map(|(i, r)| vec![(i + 1).to_string(), r.numer().to_string(), r.denom().to_string()])
            .collect(),
    });
    report
}

/// Positions of a maximal element in a uniform linear extension are
/// stochastically pushed upward: `r_i(x)` is non-decreasing in `i`.
pub fn check_rank_monotonicity(p: &FinitePoset, x: ElementId) -> Result<CheckReport, AnalysisError> {
    if !p.is_maximal(x)? {
        return Err(AnalysisError::NotMaximal(x.to_string()));
    }
    Ok(rank_profile_report(&p.rank_distribution(x)?, &x.to_string()))
}

fn above_within_scan(o: &dyn Causet, x: ElementId) -> Option<ElementId> {
    (0..MAXIMALITY_SCAN).map_while(|i| o.element(i)).find(|&y| o.less(x, y))
}

/// `r_j^W(x) <= 1/(n-j+1)` for every `n`-element stem `W` containing the
/// maximal element `x`.
pub fn absence_bound_check(o: &dyn Causet, x: ElementId, j: usize, n: usize) -> Result<CheckReport, AnalysisError> {
    if j == 0 || j > n {
        return Err(AnalysisError::InvalidParameter(format!("need 1 <= j <= n, got j = {j}, n = {n}")));
    }
    let mut tally = Tally::new("absence-bound", n, Grade::ExactRational);
    if let Some(y) = above_within_scan(o, x) {
        tally.note(format!("{} is below {}, so not maximal; bound is vacuous", o.label(x), o.label(y)));
        return Ok(tally.finish());
    }
    let bound = frac(1, (n - j + 1) as u64);
    let walk = down_sets(o, n, DEFAULT_STEM_BUDGET);
    if walk.capped {
        tally.note(format!("stem budget {DEFAULT_STEM_BUDGET} reached"));
    }
    if walk.truncated_lists {
        tally.note("minimal elements truncated; some stems not visited");
    }
    let mut checked = 0;
    for w in walk.stems.iter().filter(|w| w.len() == n && w.contains(&x)) {
        let p = restrict_down_set(o, w)?;
        let r = p.rank_distribution(x)?[j - 1].clone();
        tally.observe(positive_part(&r - &bound), || format!("[{}]: r_{j} = {r}", label_stem(o, w)));
        checked += 1;
    }
    tally.note(format!("{checked} stems of size {n} contain {}", o.label(x)));
    Ok(tally.finish())
}

/// On the crossed chains, `ν^X(E(c_0)) <= n/2^n` for every down-set `X` of
/// size `2^n` containing `c_0`.
pub fn crossed_absence_check(n: u32) -> Result<CheckReport, AnalysisError> {
    if !(1..=4).contains(&n) {
        return Err(AnalysisError::InvalidParameter(format!("n = {n} outside 1..=4")));
    }
    let o = CrossedChains;
    let c0 = CrossedChains::c(0);
    let size = 1usize << n;
    let bound = frac(n as u64, size as u64);
    let mut tally = Tally::new("crossed-absence", size, Grade::ExactRational);
    let walk = down_sets(&o, size, DEFAULT_STEM_BUDGET);
    let mut rows = Vec::new();
    let mut best = BigRational::zero();
    for w in walk.stems.iter().filter(|w| w.len() == size && w.contains(&c0)) {
        let p = restrict_down_set(&o, w)?;
        let first = p.rank_distribution(c0)?[0].clone();
        tally.observe(positive_part(&first - &bound), || format!("[{}]: {first}", label_stem(&o, w)));
        rows.push(vec![label_stem(&o, w), first.numer().to_string(), first.denom().to_string()]);
        best = best.max(first);
    }
    tally.note(format!("max {best} against bound {bound} over {} down-sets", rows.len()));
    let mut report = tally.finish();
    report.table = Some(Table { columns: vec!["down_set".into(), "num".into(), "den".into()], rows });
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::ChainPlusPoint;
    use crate::poset::shapes;

    #[test]
    fn small_example_profile() {
        // a < x with b isolated.
        let ids = [ElementId(0), ElementId(1), ElementId(2)];
        let p = FinitePoset::new(&ids, &[(ElementId(0), ElementId(1))]).unwrap();
        let r = check_rank_monotonicity(&p, ElementId(1)).unwrap();
        assert!(r.passed);
        let rows = &r.table.unwrap().rows;
        assert_eq!(rows[1][1..], ["1".to_string(), "3".to_string()]);
        assert_eq!(rows[2][1..], ["2".to_string(), "3".to_string()]);
    }

    #[test]
    fn chain_top_and_bottom() {
        let p = shapes::chain(4);
        assert!(check_rank_monotonicity(&p, ElementId(3)).unwrap().passed);
        assert!(matches!(check_rank_monotonicity(&p, ElementId(0)), Err(AnalysisError::NotMaximal(_))));
        let bottom = p.rank_distribution(ElementId(0)).unwrap();
        let r = rank_profile_report(&bottom, "bottom");
        assert!(!r.passed && !r.witnesses.is_empty());
    }

    #[test]
    fn isolated_point_bound() {
        let r = absence_bound_check(&ChainPlusPoint, ElementId(0), 1, 10).unwrap();
        assert!(r.passed, "{r:?}");
        assert!(r.notes.iter().any(|n| n.starts_with("1 stems")));
    }

    #[test]
    fn chain_element_is_vacuous() {
        let r = absence_bound_check(&ChainPlusPoint, ElementId(1), 1, 5).unwrap();
        assert!(r.passed);
        assert!(r.notes[0].contains("vacuous"));
    }

    #[test]
    fn crossed_bound_small() {
        let r = crossed_absence_check(2).unwrap();
        assert!(r.passed, "{r:?}");
        assert!(!r.table.unwrap().rows.is_empty());
    }
}
