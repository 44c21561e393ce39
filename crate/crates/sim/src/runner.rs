//! Parallel evaluation with an order-preserving merge.

use rayon::prelude::*;

use crate::error::Result;

/// Evaluates `f(0..n)` on the rayon pool and returns the results in index
/// order. When several indices fail the lowest one's error is returned, so
/// failures are as reproducible as successes.
pub fn map_indexed<T, F>(n: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    let results: Vec<Result<T>> = (0..n).into_par_iter().map(f).collect();
    results.into_iter().collect()
}
