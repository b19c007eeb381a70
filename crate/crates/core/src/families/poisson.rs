use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use super::{numbered, Causet, FamilyError, Minimals};
use crate::poset::ElementId;

/// Points of a Poisson process in `[0, horizon]^2` with the coordinate order.
///
/// Sampled once at construction. Points are numbered by increasing `x + y`,
/// which is a linear extension of the order; point `i` is labelled `p{i}`.
#[derive(Clone, Debug)]
pub struct PoissonOrder {
    points: Vec<(f64, f64)>,
    seed: u64,
    intensity: f64,
    horizon: f64,
}

impl PoissonOrder {
    pub fn sample(seed: u64, intensity: f64, horizon: f64) -> Result<Self, FamilyError> {
        if !(intensity >= 0.0 && intensity.is_finite()) || !(horizon > 0.0 && horizon.is_finite()) {
            return Err(FamilyError::InvalidParameter(format!(
                "intensity {intensity} and horizon {horizon} must be finite, non-negative and positive"
            )));
        }
        let mean = intensity * horizon * horizon;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = if mean > 0.0 {
            Poisson::new(mean).map_err(|e| FamilyError::InvalidParameter(e.to_string()))?.sample(&mut rng) as usize
        } else {
            0
        };
        if n == 0 {
            return Err(FamilyError::EmptySample);
        }
        let mut points: Vec<(f64, f64)> =
            (0..n).map(|_| (rng.random::<f64>() * horizon, rng.random::<f64>() * horizon)).collect();
        points.sort_by(|a, b| (a.0 + a.1).total_cmp(&(b.0 + b.1)));
        Ok(Self { points, seed, intensity, horizon })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    fn point(&self, x: ElementId) -> Option<(f64, f64)> {
        self.points.get(x.0 as usize).copied()
    }
}

impl Causet for PoissonOrder {
    fn descriptor(&self) -> String {
        format!("poisson(seed={},intensity={},horizon={})", self.seed, self.intensity, self.horizon)
    }

    fn size(&self) -> Option<u64> {
        Some(self.points.len() as u64)
    }

    fn less(&self, x: ElementId, y: ElementId) -> bool {
        match (self.point(x), self.point(y)) {
            (Some(p), Some(q)) => p.0 < q.0 && p.1 < q.1,
            _ => false,
        }
    }

    fn down(&self, x: ElementId) -> Vec<ElementId> {
        (0..x.0).map(ElementId).filter(|&u| self.less(u, x)).collect()
    }

    fn minimal_after(&self, stem: &[ElementId], _budget: usize) -> Minimals {
        let set: HashSet<ElementId> = stem.iter().copied().collect();
        let out = (0..self.points.len() as u64)
            .map(ElementId)
            .filter(|x| !set.contains(x) && self.down(*x).iter().all(|u| set.contains(u)))
            .collect();
        Minimals::all(out)
    }

    fn label(&self, x: ElementId) -> String {
        format!("p{}", x.0)
    }

    fn parse_label(&self, s: &str) -> Option<ElementId> {
        numbered(s, "p").map(ElementId).filter(|&x| self.contains(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_intensity_is_empty() {
        assert_eq!(PoissonOrder::sample(1, 0.0, 5.0).unwrap_err(), FamilyError::EmptySample);
    }

    #[test]
    fn deterministic_and_ordered() {
        let a = PoissonOrder::sample(7, 2.0, 3.0).unwrap();
        let b = PoissonOrder::sample(7, 2.0, 3.0).unwrap();
        assert_eq!(a.points(), b.points());
        let n = a.size().unwrap();
        assert!(n > 0);
        for i in 0..n {
            for j in 0..n {
                let (x, y) = (ElementId(i), ElementId(j));
                let (p, q) = (a.points()[i as usize], a.points()[j as usize]);
                assert_eq!(a.less(x, y), p.0 < q.0 && p.1 < q.1);
                if a.less(x, y) {
                    assert!(i < j);
                }
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(PoissonOrder::sample(1, -1.0, 1.0), Err(FamilyError::InvalidParameter(_))));
    }
}
