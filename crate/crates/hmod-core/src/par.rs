//! Data-parallel helpers with a sequential fallback.
//!
//! The hot loops in this crate (randomized norm searches, multi-instance
//! certification sweeps) are embarrassingly parallel maps over an index
//! range. With the `parallel` feature (default) they run on rayon; without it
//! the same entry points run sequentially. Results are collected in index
//! order and reduced sequentially afterwards, so both code paths produce
//! bit-identical output.

/// Execution strategy for a data-parallel map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecMode {
    Sequential,
    /// Rayon thread pool when the `parallel` feature is enabled; silently
    /// equivalent to `Sequential` otherwise.
    Parallel,
}

impl ExecMode {
    /// The default mode for the current build: parallel when compiled in.
    pub fn auto() -> Self {
        if cfg!(feature = "parallel") {
            ExecMode::Parallel
        } else {
            ExecMode::Sequential
        }
    }
}

/// Map `f` over `0..n`, collecting results in index order.
pub fn map_indexed<T, F>(mode: ExecMode, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match mode {
        ExecMode::Sequential => (0..n).map(f).collect(),
        ExecMode::Parallel => {
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
    }
}

/// Map `f` over `0..n` and fold the results sequentially in index order —
/// deterministic regardless of the execution mode.
pub fn map_fold<T, A, F, G>(mode: ExecMode, n: usize, f: F, init: A, fold: G) -> A
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
    G: FnMut(A, T) -> A,
{
    map_indexed(mode, n, f).into_iter().fold(init, fold)
}
