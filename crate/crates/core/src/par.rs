//! Thin dispatch layer between rayon and plain loops.
//!
//! Each helper has one parallel and one sequential body selected by the
//! `parallel` feature; both produce identical results, so the feature only
//! affects throughput.

/// Map a function over 0..n, collecting results in order.
pub(crate) fn map_indexed<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Map a fallible function over items, collecting results in order.
pub(crate) fn try_map<T, U, E, F>(items: &[T], f: F) -> Result<Vec<U>, E>
where
    T: Sync,
    U: Send,
    E: Send,
    F: Fn(&T) -> Result<U, E> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Fill `out[i] = f(i)` chunk-wise. Chunks only matter for work
/// distribution; results do not depend on the chunk size.
pub(crate) fn fill_indexed<U, F>(out: &mut [U], chunk: usize, f: F)
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        out.par_chunks_mut(chunk).enumerate().for_each(|(c, slice)| {
            let base = c * chunk;
            for (k, slot) in slice.iter_mut().enumerate() {
                *slot = f(base + k);
            }
        });
    }
    #[cfg(not(feature = "parallel"))]
    {
        for (c, slice) in out.chunks_mut(chunk).enumerate() {
            let base = c * chunk;
            for (k, slot) in slice.iter_mut().enumerate() {
                *slot = f(base + k);
            }
        }
    }
}
