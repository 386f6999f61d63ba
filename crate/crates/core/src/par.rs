//! Per-node map helpers and deterministic reductions.
//!
//! With the `parallel` feature the maps fan out over rayon's pool; without
//! it they run on the calling thread. Either way the output order matches
//! the input order and every reduction goes through [`pairwise_sum`], so
//! results are bit-identical regardless of thread count.

use std::ops::Add;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::Result;

const PAIRWISE_BLOCK: usize = 8;

/// Order-preserving map over a slice.
#[cfg(feature = "parallel")]
pub fn map_indexed<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(usize, &T) -> R + Sync + Send,
{
    items.par_iter().enumerate().map(|(i, x)| f(i, x)).collect()
}

/// Order-preserving map over a slice.
#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(usize, &T) -> R + Sync + Send,
{
    items.iter().enumerate().map(|(i, x)| f(i, x)).collect()
}

/// Order-preserving fallible map. Reports the error of the lowest failing
/// index, independent of scheduling.
pub fn try_map_indexed<T, R, F>(items: &[T], f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(usize, &T) -> Result<R> + Sync + Send,
{
    map_indexed(items, f).into_iter().collect()
}

/// Map over `0..n`.
pub fn map_range<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Cascade summation with a fixed split tree. The tree depends only on the
/// slice length, never on scheduling.
pub fn pairwise_sum<T>(values: &[T], zero: T) -> T
where
    T: Copy + Add<Output = T>,
{
    if values.len() <= PAIRWISE_BLOCK {
        return values.iter().fold(zero, |acc, &v| acc + v);
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid], zero) + pairwise_sum(&values[mid..], zero)
}

/// Largest value in a slice, 0 for an empty one. NaN propagates.
pub fn max_of(values: &[f64]) -> f64 {
    values.iter().fold(0.0_f64, |acc, &v| {
        if v.is_nan() || acc.is_nan() {
            f64::NAN
        } else {
            acc.max(v)
        }
    })
}
