use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::count::ExtensionTable;
use super::{ElementId, FinitePoset, PosetError, DEFAULT_STATE_BUDGET};

/// Exact uniform sampler over the linear extensions of one poset.
///
/// Candidates at each step are taken in id order and the next element is
/// drawn with probability proportional to its number of completions.
pub struct UniformSampler<'a> {
    poset: &'a FinitePoset,
    table: ExtensionTable,
}

impl<'a> UniformSampler<'a> {
    pub fn new(poset: &'a FinitePoset) -> Result<Self, PosetError> {
        Self::with_budget(poset, DEFAULT_STATE_BUDGET)
    }

    pub fn with_budget(poset: &'a FinitePoset, budget: usize) -> Result<Self, PosetError> {
        Ok(Self { poset, table: ExtensionTable::build(poset, budget)? })
    }

    pub fn count(&self) -> &BigUint {
        self.table.total()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<ElementId> {
        self.table
            .walk(self.poset, |total, weights| {
                let mut u = uniform_below(rng, total);
                for (i, w) in weights.iter().enumerate() {
                    if u < **w {
                        return i;
                    }
                    u -= *w;
                }
                unreachable!("completion counts sum to the parent count")
            })
            .into_iter()
            .map(|i| self.poset.id(i))
            .collect()
    }
}

/// One uniformly random linear extension, deterministic in `seed`.
pub fn sample_uniform_extension(p: &FinitePoset, seed: u64) -> Result<Vec<ElementId>, PosetError> {
    let sampler = UniformSampler::new(p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(sampler.sample(&mut rng))
}

/// Uniform integer in `[0, bound)` by rejection on the bit length.
pub(crate) fn uniform_below<R: Rng + ?Sized>(rng: &mut R, bound: &BigUint) -> BigUint {
    assert!(bound.bits() > 0, "empty range");
    let bits = bound.bits();
    let words = bits.div_ceil(32) as usize;
    let top = bits % 32;
    loop {
        let mut digits: Vec<u32> = (0..words).map(|_| rng.random()).collect();
        if top != 0 {
            digits[words - 1] &= (1u32 << top) - 1;
        }
        let v = BigUint::from_slice(&digits);
        if &v < bound {
            return v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::shapes::*;
    use super::*;

    #[test]
    fn single_element() {
        assert_eq!(sample_uniform_extension(&chain(1), 3).unwrap(), vec![ElementId(0)]);
    }

    #[test]
    fn deterministic_per_seed() {
        let p = grid(3, 3);
        assert_eq!(sample_uniform_extension(&p, 11).unwrap(), sample_uniform_extension(&p, 11).unwrap());
    }

    #[test]
    fn samples_are_linear_extensions() {
        let p = ladder(9);
        let s = UniformSampler::new(&p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            assert!(p.is_ordered_stem(&s.sample(&mut rng)));
        }
    }

    fn within_5_sigma(hits: usize, trials: usize, p: f64) -> bool {
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        ((hits as f64 / trials as f64) - p).abs() <= 5.0 * sigma
    }

    #[test]
    fn antichain_orders_are_balanced() {
        let p = antichain(2);
        let hits = (0..10_000u64)
            .filter(|&seed| sample_uniform_extension(&p, seed).unwrap()[0] == ElementId(0))
            .count();
        assert!(within_5_sigma(hits, 10_000, 0.5), "{hits}");
    }

    #[test]
    fn ladder_first_element_frequency() {
        let p = ladder(5);
        let hits = (0..10_000u64)
            .filter(|&seed| sample_uniform_extension(&p, seed).unwrap()[0] == ElementId(0))
            .count();
        assert!(within_5_sigma(hits, 10_000, 5.0 / 8.0), "{hits}");
    }

    #[test]
    fn uniform_below_stays_in_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let b = BigUint::from(1_000_003u64) * BigUint::from(u64::MAX);
        for _ in 0..200 {
            assert!(uniform_below(&mut rng, &b) < b);
        }
    }
}
