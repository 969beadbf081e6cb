//! Deterministic reductions and grid evaluation.
//!
//! Means are computed with a pairwise tree in index order. The tree shape
//! depends only on the length, never on how the values were produced.

use alloc::vec::Vec;

const LEAF: usize = 8;

/// Pairwise sum in index order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= LEAF {
        let mut acc = 0.0;
        for v in values {
            acc += *v;
        }
        return acc;
    }
    let (lo, hi) = values.split_at(values.len() / 2);
    pairwise_sum(lo) + pairwise_sum(hi)
}

/// Pairwise mean; zero for an empty slice.
pub fn pairwise_mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    pairwise_sum(values) / values.len() as f64
}

/// Evaluates `f` at every index in `0..n`, preserving order.
#[cfg(feature = "parallel")]
pub fn map_indices<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

/// Evaluates `f` at every index in `0..n`, preserving order.
#[cfg(not(feature = "parallel"))]
pub fn map_indices<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn pairwise_matches_exact_integers() {
        let v: Vec<f64> = (1..=1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&v), 500500.0);
        assert_eq!(pairwise_mean(&v), 500.5);
    }

    #[test]
    fn empty_mean_is_zero() {
        assert_eq!(pairwise_mean(&[]), 0.0);
    }

    #[test]
    fn tree_shape_depends_on_length_only() {
        let v = vec![0.1, 1e16, -1e16, 0.3, 0.7, 1e-3, 5.0, 2.0, 9.0, 1e10, -1e10];
        let a = pairwise_sum(&v);
        let b = pairwise_sum(&v.clone());
        assert_eq!(a.to_bits(), b.to_bits());
        let mapped = map_indices(v.len(), |i| v[i]);
        assert_eq!(pairwise_sum(&mapped).to_bits(), a.to_bits());
    }
}
