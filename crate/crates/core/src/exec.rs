//! Indexed map that runs on the rayon pool when the `parallel` feature is
//! enabled and sequentially otherwise.
//!
//! Results are collected in index order either way, so callers that reduce
//! over the returned vector get identical floating-point results at any
//! thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Apply `f` to each index in `0..n`, returning results in index order.
/// `min_chunk` bounds how finely rayon may split the range; it is ignored by
/// the sequential build.
#[cfg(feature = "parallel")]
pub(crate) fn map_indexed<T, F>(n: usize, min_chunk: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n)
        .into_par_iter()
        .with_min_len(min_chunk.max(1))
        .map(f)
        .collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_indexed<T, F>(n: usize, _min_chunk: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preserves_index_order() {
        let out = map_indexed(1000, 16, |i| i * i);
        for (i, v) in out.iter().enumerate() {
            assert_eq!(*v, i * i);
        }
    }

    #[test]
    fn empty_range() {
        let out: Vec<usize> = map_indexed(0, 1, |i| i);
        assert!(out.is_empty());
    }
}
