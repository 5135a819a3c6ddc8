//! Thin data-parallel shim.
//!
//! All solver hot loops funnel through these helpers so that the crate builds
//! either on rayon (`parallel` feature, default) or as a plain sequential
//! library with identical results. Reductions happen on the collected output
//! in index order, so scheduling never changes the numbers.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `0..n` to a vector, in parallel when enabled. Output order is by index.
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
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

/// Map fixed-size chunks of `0..n`. `f` receives `(chunk_start, chunk_end)`
/// and the per-chunk results are returned in chunk order, so a subsequent
/// sequential fold is deterministic regardless of scheduling.
pub fn map_chunks<T, F>(n: usize, chunk: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, usize) -> T + Sync + Send,
{
    assert!(chunk > 0);
    let n_chunks = n.div_ceil(chunk);
    map_indexed(n_chunks, |c| {
        let start = c * chunk;
        let end = usize::min(start + chunk, n);
        f(start, end)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_indexed_preserves_order() {
        let v = map_indexed(1000, |i| i * i);
        assert_eq!(v[17], 289);
        assert_eq!(v.len(), 1000);
    }

    #[test]
    fn chunked_fold_matches_sequential_sum() {
        let sums = map_chunks(10_000, 128, |a, b| (a..b).map(|i| i as f64).sum::<f64>());
        let total: f64 = sums.iter().sum();
        assert_eq!(total, (0..10_000).map(|i| i as f64).sum::<f64>());
    }
}
