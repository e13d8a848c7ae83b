//! Order-preserving parallel map over path indices.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Evaluates `f(0..n)` on the rayon pool and returns results in index order,
/// so reductions over the output are independent of scheduling.
pub fn par_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

/// Sets the size of the global worker pool. Only the first call has an effect.
pub fn configure_workers(workers: usize) -> Result<()> {
    if workers == 0 {
        return Err(Error::OutOfRange("worker count must be at least 1".into()));
    }
    // A second initialization attempt is harmless: keep the existing pool.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build_global();
    Ok(())
}

/// Pairwise (tree) sum: the grouping depends only on the length, never on scheduling.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if xs.len() <= LEAF {
        return xs.iter().sum();
    }
    let (l, r) = xs.split_at(xs.len() / 2);
    pairwise_sum(l) + pairwise_sum(r)
}

/// Mean and standard error of the mean, both from pairwise sums.
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let m = pairwise_sum(xs) / n;
    if xs.len() < 2 {
        return (m, f64::NAN);
    }
    let dev: Vec<f64> = xs.iter().map(|x| (x - m) * (x - m)).collect();
    (m, (pairwise_sum(&dev) / (n - 1.0) / n).sqrt())
}
