//! Fixed-partition fan-out. Work is split into blocks whose boundaries do not
//! depend on the thread count, and results come back in block order, so
//! floating-point reductions are identical with or without `parallel`.

use alloc::vec::Vec;
use core::ops::Range;

pub(crate) const BLOCK: usize = 32;

pub(crate) fn map_blocks<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<usize>) -> T + Sync + Send,
{
    let blocks = n.div_ceil(BLOCK);
    let range = move |b: usize| b * BLOCK..((b + 1) * BLOCK).min(n);
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..blocks).into_par_iter().map(|b| f(range(b))).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..blocks).map(|b| f(range(b))).collect()
    }
}

pub(crate) fn map_ordered<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
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
