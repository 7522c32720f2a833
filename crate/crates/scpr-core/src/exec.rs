//! Index-ordered map over a range, parallel when the `parallel` feature is on.
//!
//! Every caller computes element `i` as a pure function of `i` and shared
//! immutable data, and the results are collected in index order, so the
//! parallel and sequential builds produce bit-identical vectors.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[cfg(feature = "parallel")]
pub fn map_indexed<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    // Individual updates are sub-microsecond; without a minimum chunk the
    // scheduling overhead swamps the work.
    (0..len).into_par_iter().with_min_len(128).map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..len).map(f).collect()
}
