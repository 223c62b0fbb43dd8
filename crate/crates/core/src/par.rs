//! Data-parallel helpers with a sequential fallback.

/// Maps `f` over `items`, preserving order.
#[cfg(feature = "parallel")]
pub fn map<T: Sync, R: Send, F: Fn(&T) -> R + Sync + Send>(items: &[T], f: F) -> Vec<R> {
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map<T: Sync, R: Send, F: Fn(&T) -> R + Sync + Send>(items: &[T], f: F) -> Vec<R> {
    items.iter().map(f).collect()
}

/// Whether the parallel path is compiled in.
pub const PARALLEL: bool = cfg!(feature = "parallel");
