//! Order-preserving map helpers that run on rayon when the feature is on.
//!
//! Work items are pure functions of their index, and outputs are collected in
//! input order, so the sequential and parallel paths produce identical bytes.

use alloc::vec::Vec;

#[cfg(feature = "rayon")]
use rayon::prelude::*;

// The wrapper closures capture `&f`, which is what lets `F: Sync` suffice
// for rayon (it would otherwise also demand `F: Send`).
#[allow(clippy::redundant_closure)]
pub(crate) fn map_slice<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync,
{
    #[cfg(feature = "rayon")]
    {
        items.par_iter().map(|item| f(item)).collect()
    }
    #[cfg(not(feature = "rayon"))]
    {
        items.iter().map(|item| f(item)).collect()
    }
}

#[allow(clippy::redundant_closure)]
pub(crate) fn map_range<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync,
{
    #[cfg(feature = "rayon")]
    {
        (0..n).into_par_iter().map(|i| f(i)).collect()
    }
    #[cfg(not(feature = "rayon"))]
    {
        (0..n).map(|i| f(i)).collect()
    }
}
