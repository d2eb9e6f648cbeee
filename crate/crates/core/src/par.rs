// SPDX-License-Identifier: Apache-2.0

//! Thin switch between rayon and sequential iteration.
//!
//! Reductions never depend on how work is split across threads: sums are
//! formed per fixed-size chunk and the chunk partials are added in order.

use alloc::vec;
use alloc::vec::Vec;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Rows per reduction chunk.
pub(crate) const SUM_CHUNK: usize = 1 << 13;

/// Calls `f(row_index, row)` for every `width`-wide row of `out`.
pub(crate) fn for_each_row<F>(out: &mut [f64], width: usize, f: F)
where
    F: Fn(usize, &mut [f64]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    out.par_chunks_mut(width)
        .with_min_len(256)
        .enumerate()
        .for_each(|(i, row)| f(i, row));
    #[cfg(not(feature = "parallel"))]
    out.chunks_mut(width).enumerate().for_each(|(i, row)| f(i, row));
}

/// Per-column sums of a row-major block with `width` columns, restricted to
/// rows for which `keep(row)` holds.
pub(crate) fn column_sums<K>(x: &[f64], width: usize, keep: K) -> Vec<f64>
where
    K: Fn(usize) -> bool + Sync + Send,
{
    let chunk_len = SUM_CHUNK * width;
    let partial = |(ci, chunk): (usize, &[f64])| {
        let mut acc = vec![0.0; width];
        let base = ci * SUM_CHUNK;
        for (r, row) in chunk.chunks(width).enumerate() {
            if keep(base + r) {
                for (a, v) in acc.iter_mut().zip(row) {
                    *a += v;
                }
            }
        }
        acc
    };
    #[cfg(feature = "parallel")]
    let partials: Vec<Vec<f64>> = x.par_chunks(chunk_len).enumerate().map(partial).collect();
    #[cfg(not(feature = "parallel"))]
    let partials: Vec<Vec<f64>> = x.chunks(chunk_len).enumerate().map(partial).collect();
    let mut total = vec![0.0; width];
    for p in partials {
        for (t, v) in total.iter_mut().zip(p) {
            *t += v;
        }
    }
    total
}

/// Sum of `f(i)` over `0..n`, chunked deterministically.
pub(crate) fn sum_by<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let chunks = n.div_ceil(SUM_CHUNK);
    let partial = |c: usize| {
        let lo = c * SUM_CHUNK;
        let hi = (lo + SUM_CHUNK).min(n);
        (lo..hi).map(&f).sum::<f64>()
    };
    #[cfg(feature = "parallel")]
    let partials: Vec<f64> = (0..chunks).into_par_iter().map(partial).collect();
    #[cfg(not(feature = "parallel"))]
    let partials: Vec<f64> = (0..chunks).map(partial).collect();
    partials.into_iter().sum()
}

/// Order-preserving map over `items`.
pub(crate) fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    return items.par_iter().map(f).collect();
    #[cfg(not(feature = "parallel"))]
    return items.iter().map(f).collect();
}
