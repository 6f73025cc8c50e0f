//! Order-independent batch execution.
//!
//! With the `parallel` feature (default) work items run on the rayon pool;
//! without it they run in a plain loop. Output order always follows input
//! order and every item owns its own seeded generator, so both paths return
//! identical results.

use crate::sim::{self, SimConfig, SimResult};

/// `f(0), f(1), ..., f(n - 1)`, possibly in parallel.
pub fn map_range<R: Send>(n: u64, f: &(dyn Fn(u64) -> R + Sync)) -> Vec<R> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_range_sequential(n, f)
    }
}

pub fn map_range_sequential<R>(n: u64, f: &(dyn Fn(u64) -> R + Sync)) -> Vec<R> {
    (0..n).map(f).collect()
}

/// Apply `f` to every item, possibly in parallel.
pub fn map_slice<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
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

/// Run every configuration; results are in input order.
pub fn run_batch(configs: &[SimConfig]) -> Vec<crate::Result<SimResult>> {
    map_slice(configs, sim::run)
}

pub fn run_batch_sequential(configs: &[SimConfig]) -> Vec<crate::Result<SimResult>> {
    configs.iter().map(sim::run).collect()
}

/// Whether batches actually run on a thread pool in this build.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}
