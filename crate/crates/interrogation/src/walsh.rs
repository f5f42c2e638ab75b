//! In-place fast Walsh-Hadamard transform.
//!
//! `fwht` applies the unnormalized transform `W[y] = sum_x (-1)^<x,y> a[x]`
//! in `O(len * log len)` butterfly operations. The sequential and parallel
//! paths execute the same butterflies on the same operands in the same order,
//! so their outputs are bit-for-bit identical; the parallel path merely runs
//! independent butterflies on worker threads.

/// Below this length the parallel path falls back to the sequential kernel.
#[cfg(feature = "parallel")]
const PAR_MIN_LEN: usize = 1 << 14;

/// Unnormalized Walsh-Hadamard transform, in place.
///
/// The length must be a power of two. Applying the transform twice multiplies
/// the input by the length.
pub fn fwht(data: &mut [f64]) {
    assert!(
        data.len().is_power_of_two(),
        "length must be a power of two"
    );
    #[cfg(feature = "parallel")]
    {
        fwht_recursive(data);
    }
    #[cfg(not(feature = "parallel"))]
    {
        fwht_seq(data);
    }
}

/// Sequential transform: stages of butterflies with stride 1, 2, 4, ...
pub fn fwht_seq(data: &mut [f64]) {
    assert!(
        data.len().is_power_of_two(),
        "length must be a power of two"
    );
    let mut h = 1;
    while h < data.len() {
        for chunk in data.chunks_exact_mut(2 * h) {
            let (lo, hi) = chunk.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h <<= 1;
    }
}

/// Parallel transform: each half is a complete independent sub-transform
/// (the stride-1 through stride-len/4 stages restricted to that half), then
/// the final stride-len/2 stage combines the halves elementwise.
#[cfg(feature = "parallel")]
fn fwht_recursive(data: &mut [f64]) {
    use rayon::prelude::*;

    if data.len() <= PAR_MIN_LEN {
        fwht_seq(data);
        return;
    }
    let half = data.len() / 2;
    let (lo, hi) = data.split_at_mut(half);
    rayon::join(|| fwht_recursive(lo), || fwht_recursive(hi));
    lo.par_iter_mut().zip(hi.par_iter_mut()).for_each(|(a, b)| {
        let (x, y) = (*a, *b);
        *a = x + y;
        *b = x - y;
    });
}
