//! Data-parallel loops over elements, lines and nodes.
//!
//! With the `parallel` feature the loops run on the rayon pool; without it
//! they are plain sequential iterators. Either way every output slot is
//! written by exactly one closure call, so results do not depend on the
//! thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Calls `f(index, block)` for each consecutive `block_len` chunk of `out`.
pub fn for_each_block<F>(out: &mut [f64], block_len: usize, f: F)
where
    F: Fn(usize, &mut [f64]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    out.par_chunks_mut(block_len)
        .enumerate()
        .for_each(|(i, b)| f(i, b));
    #[cfg(not(feature = "parallel"))]
    out.chunks_mut(block_len)
        .enumerate()
        .for_each(|(i, b)| f(i, b));
}

/// Evaluates `f` on `0..n` and collects the results in index order.
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

/// Whether the crate was built with the rayon backend.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}
