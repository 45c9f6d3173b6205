//! Deterministic reductions.
//!
//! Results must be bit-identical across runs and thread counts, so all big
//! sums use fixed-size chunking: chunk partial sums may be computed in
//! parallel, but chunk boundaries and the final combination order are fixed.

use rayon::prelude::*;

/// Chunk length for deterministic parallel reductions.
pub(crate) const SUM_CHUNK: usize = 1 << 15;

/// Compensated (Kahan) sequential sum.
pub(crate) fn kahan_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut s = 0.0;
    let mut c = 0.0;
    for v in values {
        let y = v - c;
        let t = s + y;
        c = (t - s) - y;
        s = t;
    }
    s
}

/// Deterministic sum of `f(i)` over `0..len`: fixed chunks, Kahan within a
/// chunk and across chunk results.
pub(crate) fn det_sum_indexed<F>(len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let n_chunks = len.div_ceil(SUM_CHUNK);
    let partials: Vec<f64> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * SUM_CHUNK;
            let hi = (lo + SUM_CHUNK).min(len);
            kahan_sum((lo..hi).map(&f))
        })
        .collect();
    kahan_sum(partials)
}

/// Deterministic maximum of `f(i)` over `0..len`.
pub(crate) fn det_max_indexed<F>(len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let n_chunks = len.div_ceil(SUM_CHUNK);
    let partials: Vec<f64> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * SUM_CHUNK;
            let hi = (lo + SUM_CHUNK).min(len);
            (lo..hi).map(&f).fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    partials.into_iter().fold(f64::NEG_INFINITY, f64::max)
}
