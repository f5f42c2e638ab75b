//! Deterministic summation helpers.
//!
//! The parallel and sequential builds must produce bit-identical numbers, so
//! reductions are performed over fixed-size chunks in a fixed combination
//! order regardless of how many worker threads touch them.

/// Chunk size for deterministic array reductions.
pub(crate) const SUM_CHUNK: usize = 1 << 12;

/// Pairwise (cascade) summation; deterministic and accurate to O(log n) ulps.
pub(crate) fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        let mut s = 0.0;
        for x in xs {
            s += x;
        }
        return s;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Sum of `f(index, value)` over the slice: sequential within fixed chunks,
/// pairwise across chunk results. The parallel build distributes chunks over
/// threads; chunk boundaries and the combination order never change, so the
/// result is identical in both builds.
#[cfg(feature = "parallel")]
pub(crate) fn chunked_sum_indexed<F>(xs: &[f64], f: F) -> f64
where
    F: Fn(usize, f64) -> f64 + Sync,
{
    use rayon::prelude::*;

    let partials: Vec<f64> = xs
        .par_chunks(SUM_CHUNK)
        .enumerate()
        .map(|(c, chunk)| {
            let base = c * SUM_CHUNK;
            let mut s = 0.0;
            for (i, &x) in chunk.iter().enumerate() {
                s += f(base + i, x);
            }
            s
        })
        .collect();
    pairwise_sum(&partials)
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn chunked_sum_indexed<F>(xs: &[f64], f: F) -> f64
where
    F: Fn(usize, f64) -> f64,
{
    let partials: Vec<f64> = xs
        .chunks(SUM_CHUNK)
        .enumerate()
        .map(|(c, chunk)| {
            let base = c * SUM_CHUNK;
            let mut s = 0.0;
            for (i, &x) in chunk.iter().enumerate() {
                s += f(base + i, x);
            }
            s
        })
        .collect();
    pairwise_sum(&partials)
}
