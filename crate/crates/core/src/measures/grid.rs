//! Exact uniform probabilities on finite Young diagrams of the grid.
//!
//! A grid down-set is a Young diagram: row `a` holds the cells `(a, 0..λ_a)`.
//! Extension counts come from the hook length formula; the complement of a
//! stem is a skew diagram, counted with Aitken's determinant
//! `f^{λ/μ} = n! det[1 / (λ_i - μ_j - i + j)!]`.

use std::collections::HashSet;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::MeasureError;
use crate::exact::ratio_of;
use crate::families::{check_ordered_stem, Grid};
use crate::poset::ElementId;

/// Row lengths of a grid down-set, longest first.
pub fn partition_of(cells: &[ElementId]) -> Result<Vec<u64>, MeasureError> {
    let set: HashSet<(u64, u64)> = cells.iter().map(|&x| Grid::coords(x)).collect();
    if set.len() != cells.len() {
        return Err(MeasureError::NotAYoungDiagram("repeated cell".into()));
    }
    let mut rows: Vec<u64> = Vec::new();
    for &(a, b) in &set {
        let below_ok = a == 0 || set.contains(&(a - 1, b));
        let left_ok = b == 0 || set.contains(&(a, b - 1));
        if !below_ok || !left_ok {
            return Err(MeasureError::NotAYoungDiagram(format!("({a},{b}) lacks a lower neighbour")));
        }
        if rows.len() <= a as usize {
            rows.resize(a as usize + 1, 0);
        }
        rows[a as usize] += 1;
    }
    Ok(rows)
}

/// The cells of the diagram with the given row lengths.
pub fn cells_of(rows: &[u64]) -> Vec<ElementId> {
    let mut v: Vec<ElementId> =
        rows.iter().enumerate().flat_map(|(a, &l)| (0..l).map(move |b| Grid::id(a as u64, b))).collect();
    v.sort_unstable();
    v
}

fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * k)
}

/// Number of standard Young tableaux of shape `rows`, by hook lengths.
pub fn hook_count(rows: &[u64]) -> BigUint {
    let n: u64 = rows.iter().sum();
    let mut hooks = BigUint::one();
    for (i, &len) in rows.iter().enumerate() {
        for j in 0..len {
            let below = rows[i + 1..].iter().take_while(|&&l| l > j).count() as u64;
            hooks *= len - j + below;
        }
    }
    factorial(n) / hooks
}

fn determinant(mut m: Vec<Vec<BigRational>>) -> BigRational {
    let n = m.len();
    let mut det = BigRational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !m[r][c].is_zero()) else { return BigRational::zero() };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        let pivot = m[c][c].clone();
        det *= &pivot;
        let (upper, lower) = m.split_at_mut(c + 1);
        let pivot_row = &upper[c];
        for row in lower.iter_mut() {
            let f = &row[c] / &pivot;
            if f.is_zero() {
                continue;
            }
            for (x, y) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                *x -= &f * y;
            }
        }
    }
    det
}

/// Number of standard fillings of the skew shape `outer / inner`.
pub fn skew_count(outer: &[u64], inner: &[u64]) -> BigUint {
    let l = outer.len();
    let n: u64 = outer.iter().sum::<u64>() - inner.iter().sum::<u64>();
    let inv_fact = |k: i64| -> BigRational {
        if k < 0 {
            BigRational::zero()
        } else {
            BigRational::new(BigInt::one(), BigInt::from(factorial(k as u64)))
        }
    };
    let mu = |j: usize| inner.get(j).copied().unwrap_or(0) as i64;
    let m: Vec<Vec<BigRational>> = (0..l)
        .map(|i| (0..l).map(|j| inv_fact(outer[i] as i64 - mu(j) - i as i64 + j as i64)).collect())
        .collect();
    let v = determinant(m) * BigRational::from_integer(BigInt::from(factorial(n)));
    v.to_integer().to_biguint().expect("counts are non-negative")
}

/// ν^{shape}(E(stem)) for a finite Young diagram, as a ratio of tableau counts.
pub fn grid_finite_nu(shape: &[ElementId], stem: &[ElementId]) -> Result<BigRational, MeasureError> {
    let outer = partition_of(shape)?;
    check_ordered_stem(&Grid, stem)?;
    let inner = partition_of(stem)?;
    if inner.len() > outer.len() || inner.iter().zip(&outer).any(|(i, o)| i > o) {
        return Err(MeasureError::NotAYoungDiagram("the stem is not inside the shape".into()));
    }
    Ok(ratio_of(&skew_count(&outer, &inner), &hook_count(&outer)))
}

/// All partitions of `n`, each as non-increasing row lengths.
pub fn partitions(n: u64) -> Vec<Vec<u64>> {
    fn go(n: u64, max: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        for part in (1..=n.min(max)).rev() {
            cur.push(part);
            go(n - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}
