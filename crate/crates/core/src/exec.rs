//! Data-parallel execution helpers.
//!
//! Every loop over grid nodes, planes or sample points goes through
//! [`map_indices`] / [`map_slice`]. With the `parallel` feature (default) the
//! work is spread over the rayon pool; without it, or inside [`sequential`],
//! the plain iterator path runs on the calling thread. Output order is the
//! input order in both cases, so results are bit-identical.

use std::cell::Cell;

thread_local! {
    static FORCE_SEQUENTIAL: Cell<bool> = const { Cell::new(false) };
}

/// Run `op` with every helper in this module forced onto the sequential path
/// for the calling thread.
pub fn sequential<R>(op: impl FnOnce() -> R) -> R {
    let previous = FORCE_SEQUENTIAL.with(|flag| flag.replace(true));
    let out = op();
    FORCE_SEQUENTIAL.with(|flag| flag.set(previous));
    out
}

/// True when the parallel path would be taken from this thread.
pub fn is_parallel() -> bool {
    cfg!(feature = "parallel") && !FORCE_SEQUENTIAL.with(Cell::get)
}

pub fn map_indices<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if is_parallel() {
        use rayon::prelude::*;
        return (0..len).into_par_iter().map(f).collect();
    }
    (0..len).map(f).collect()
}

pub fn map_slice<S, T, F>(items: &[S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    items.iter().map(f).collect()
}

/// Configure the global rayon pool. A no-op without the `parallel` feature.
pub fn init_threads(threads: Option<usize>) -> Result<(), String> {
    #[cfg(feature = "parallel")]
    if let Some(n) = threads {
        return rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| e.to_string());
    }
    let _ = threads;
    Ok(())
}
