use std::thread;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::AnalysisError;
use crate::families::{check_ordered_stem, DEFAULT_LIST_BUDGET};
use crate::measures::Measure;
use crate::poset::ElementId;

/// Width of confidence bands, in standard errors.
pub const SIGMAS: f64 = 5.0;

/// Largest minimal-element list requested when a draw lands in the unlisted tail.
const MAX_LIST: usize = 1 << 16;

/// A finite prefix `x_1 x_2 ... x_n` of a run of the process.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Trajectory {
    pub seq: Vec<ElementId>,
    pub seed: u64,
    pub measure: String,
}

impl Trajectory {
    /// The `j`-th element, counting from 1.
    pub fn xi(&self, j: usize) -> Option<ElementId> {
        j.checked_sub(1).and_then(|i| self.seq.get(i)).copied()
    }

    /// The first `j` elements.
    pub fn prefix(&self, j: usize) -> &[ElementId] {
        &self.seq[..j.min(self.seq.len())]
    }

    pub fn len(&self) -> usize {
        self.seq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seq.is_empty()
    }
}

/// Pick the next element for a uniform draw `u`.
fn next_element(mu: &dyn Measure, stem: &[ElementId], u: f64) -> Result<Option<ElementId>, AnalysisError> {
    let mut budget = DEFAULT_LIST_BUDGET;
    loop {
        let t = mu.transition(stem, budget)?;
        let mut acc = 0.0;
        let mut last_positive = None;
        for (x, w) in &t.weights {
            let w = w.to_f64();
            if w > 0.0 {
                last_positive = Some(*x);
            }
            acc += w;
            if u < acc {
                return Ok(Some(*x));
            }
        }
        if t.exhaustive {
            // Rounding can leave `u` just above the float total.
            return Ok(last_positive);
        }
        if budget >= MAX_LIST {
            return Ok(None);
        }
        budget *= 4;
    }
}

fn run(mu: &dyn Measure, steps: usize, rng: &mut ChaCha8Rng, stop: impl Fn(usize, ElementId) -> bool) -> Result<Vec<ElementId>, AnalysisError> {
    let mut seq = Vec::with_capacity(steps);
    while seq.len() < steps {
        let u: f64 = rng.random();
        let x = next_element(mu, &seq, u)?.ok_or(AnalysisError::Stalled { step: seq.len() + 1 })?;
        if stop(seq.len(), x) {
            break;
        }
        seq.push(x);
    }
    Ok(seq)
}

pub(crate) fn run_with(mu: &dyn Measure, steps: usize, rng: &mut ChaCha8Rng) -> Result<Vec<ElementId>, AnalysisError> {
    run(mu, steps, rng, |_, _| false)
}

/// Draw `steps` elements of the process, deterministically per seed.
pub fn simulate(mu: &dyn Measure, steps: usize, seed: u64) -> Result<Trajectory, AnalysisError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let seq = run_with(mu, steps, &mut rng)?;
    Ok(Trajectory { seq, seed, measure: mu.name() })
}

/// Random stream for replica `r`, independent across replicas.
pub(crate) fn replica_rng(seed: u64, r: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(r);
    rng
}

/// Run `f` on replicas `0..replicas` across threads; results in replica order.
pub(crate) fn par_replicas<T: Send>(
    replicas: usize,
    f: impl Fn(u64) -> Result<T, AnalysisError> + Sync,
) -> Result<Vec<T>, AnalysisError> {
    let workers = thread::available_parallelism().map_or(1, |n| n.get()).min(replicas.max(1));
    let chunk = replicas.div_ceil(workers.max(1)).max(1);
    let f = &f;
    let parts: Vec<Result<Vec<T>, AnalysisError>> = thread::scope(|s| {
        let handles: Vec<_> = (0..replicas)
            .step_by(chunk)
            .map(|start| s.spawn(move || (start..(start + chunk).min(replicas)).map(|r| f(r as u64)).collect()))
            .collect();
        handles.into_iter().map(|h| h.join().expect("replica worker panicked")).collect()
    });
    let mut out = Vec::with_capacity(replicas);
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EventEstimate {
    pub estimate: f64,
    pub half_width: f64,
    pub hits: usize,
    pub replicas: usize,
}

impl EventEstimate {
    pub fn contains(&self, p: f64) -> bool {
        (p - self.estimate).abs() <= self.half_width
    }
}

/// Monte-Carlo frequency of `E(stem)` with a 5σ half-width, where
/// `σ² = (p̂(1-p̂) + 1/N)/N` keeps the band open when `p̂` is 0 or 1.
pub fn estimate_event(mu: &dyn Measure, stem: &[ElementId], replicas: usize, seed: u64) -> Result<EventEstimate, AnalysisError> {
    if replicas == 0 {
        return Err(AnalysisError::InvalidParameter("replicas must be positive".into()));
    }
    check_ordered_stem(mu.support().as_ref(), stem)?;
    let hits = par_replicas(replicas, |r| {
        let mut rng = replica_rng(seed, r);
        let seq = run(mu, stem.len(), &mut rng, |i, x| stem[i] != x)?;
        Ok(seq.len() == stem.len())
    })?
    .into_iter()
    .filter(|&h| h)
    .count();
    let n = replicas as f64;
    let p = hits as f64 / n;
    let sigma = ((p * (1.0 - p) + 1.0 / n) / n).sqrt();
    Ok(EventEstimate { estimate: p, half_width: SIGMAS * sigma, hits, replicas })
}
