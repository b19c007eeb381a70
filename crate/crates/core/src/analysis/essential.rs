use num_traits::ToPrimitive;

use super::simulate::{par_replicas, replica_rng};
use super::{AnalysisError, CheckReport, Table, Tally};
use crate::exact::{Grade, Prob};
use crate::families::{check_ordered_stem, label_stem, restrict_down_set};
use crate::measures::Measure;
use crate::poset::ElementId;

/// Largest mean deviation `|ν^k - μ|` accepted at the last `k`.
pub const ESSENTIAL_TOL: f64 = 0.1;

/// Deviation beyond which a replica counts as split away from `μ`.
const SPLIT_MARGIN: f64 = 0.1;

/// Along sampled runs `ω`, the uniform measure on the first `k` elements
/// should give `E(stem)` a probability tending to `μ(E(stem))`.
///
/// Fails when the mean deviation at the largest `k` exceeds
/// [`ESSENTIAL_TOL`] or grew since the smallest `k`. The full `(k, ν^k)`
/// table is attached.
pub fn essentiality_test(
    mu: &dyn Measure,
    stem: &[ElementId],
    replicas: usize,
    k_grid: &[usize],
    seed: u64,
) -> Result<CheckReport, AnalysisError> {
    let o = mu.support().clone();
    check_ordered_stem(o.as_ref(), stem)?;
    let mut grid: Vec<usize> = k_grid.iter().copied().filter(|&k| k >= stem.len().max(1)).collect();
    grid.sort_unstable();
    grid.dedup();
    let (Some(&k_min), Some(&k_max)) = (grid.first(), grid.last()) else {
        return Err(AnalysisError::InvalidParameter("k grid has no usable entries".into()));
    };
    if replicas == 0 {
        return Err(AnalysisError::InvalidParameter("replicas must be positive".into()));
    }
    let target = mu.prob(stem)?.to_f64();
    let nus: Vec<Vec<f64>> = par_replicas(replicas, |r| {
        let mut rng = replica_rng(seed, r);
        let traj = super::simulate::run_with(mu, k_max, &mut rng)?;
        grid.iter()
            .map(|&k| {
                let xk = &traj[..k];
                if !stem.iter().all(|x| xk.contains(x)) {
                    return Ok(0.0);
                }
                let p = restrict_down_set(o.as_ref(), xk)?;
                Ok(p.nu_uniform(stem)?.to_f64().unwrap_or(f64::NAN))
            })
            .collect()
    })?;
    let n = replicas as f64;
    let mut rows = Vec::new();
    let mut devs = Vec::new();
    for (i, &k) in grid.iter().enumerate() {
        let col: Vec<f64> = nus.iter().map(|v| v[i]).collect();
        let mean = col.iter().sum::<f64>() / n;
        let dev = col.iter().map(|v| (v - target).abs()).sum::<f64>() / n;
        let low = col.iter().filter(|&&v| v < target - SPLIT_MARGIN).count() as f64 / n;
        let high = col.iter().filter(|&&v| v > target + SPLIT_MARGIN).count() as f64 / n;
        devs.push(dev);
        rows.push(vec![k.to_string(), format!("{mean:.6}"), format!("{dev:.6}"), format!("{low:.4}"), format!("{high:.4}")]);
    }
    let (first, last) = (devs[0], *devs.last().expect("grid is nonempty"));
    let residual = (last - ESSENTIAL_TOL).max(last - first).max(0.0);
    let mut tally = Tally::new("essentiality", k_max, Grade::MonteCarlo);
    tally.observe(Prob::Float(residual), || {
        format!("[{}]: mean |nu^k - mu| = {last:.4} at k = {k_max} (was {first:.4} at k = {k_min})", label_stem(o.as_ref(), stem))
    });
    let split = &rows[rows.len() - 1];
    tally.note(format!("target {target:.6}; at k = {k_max}, fraction below {} and above {}", split[3], split[4]));
    let mut report = tally.finish();
    report.table = Some(Table {
        columns: ["k", "mean_nu", "mean_abs_dev", "frac_low", "frac_high"].map(String::from).to_vec(),
        rows,
    });
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{mixture_measure, mu_q, MeasureRef};
    use num_rational::BigRational;
    use std::sync::Arc;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn fair_chains_are_essential() {
        let mu = mu_q(q(1, 2)).unwrap();
        let stem = vec![ElementId(0)];
        let r = essentiality_test(&mu, &stem, 40, &[10, 40, 120], 11).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r.table.unwrap().rows.len(), 3);
    }

    #[test]
    fn mixture_splits() {
        let a: MeasureRef = Arc::new(mu_q(q(1, 5)).unwrap());
        let b: MeasureRef = Arc::new(mu_q(q(4, 5)).unwrap());
        let mix = mixture_measure(vec![(a, Prob::ratio(1, 2)), (b, Prob::ratio(1, 2))]).unwrap();
        let r = essentiality_test(&mix, &[ElementId(0)], 40, &[10, 40, 120], 11).unwrap();
        assert!(!r.passed);
        assert_eq!(r.witnesses.len(), 1);
    }
}
