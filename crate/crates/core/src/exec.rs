//! Sequential/parallel dispatch for the data-parallel loops.
//!
//! With the `parallel` feature (on by default) [`Execution::Parallel`] runs
//! on the rayon global pool; without it every call runs sequentially and the
//! two modes are indistinguishable.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    Parallel,
    /// Parallel only when the work is large enough to amortize scheduling.
    #[default]
    Auto,
}

/// Smallest piece of an index range handed to one rayon task.
#[cfg(feature = "parallel")]
const MIN_CHUNK: usize = 128;

/// Below this many items `Auto` stays sequential.
pub const AUTO_THRESHOLD: usize = 512;

impl Execution {
    pub fn is_parallel(self, len: usize) -> bool {
        if !cfg!(feature = "parallel") {
            return false;
        }
        match self {
            Execution::Sequential => false,
            Execution::Parallel => true,
            Execution::Auto => len >= AUTO_THRESHOLD,
        }
    }
}

/// `(0..len).map(f).collect()`, in parallel when `exec` says so. Output order
/// is index order either way.
pub fn map_indices<T, F>(exec: Execution, len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel(len) {
        return (0..len).into_par_iter().with_min_len(MIN_CHUNK).map(f).collect();
    }
    let _ = exec;
    (0..len).map(f).collect()
}

/// `items.iter().map(f).collect()`, in parallel when `exec` says so.
pub fn map_slice<S, T, F>(exec: Execution, items: &[S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel(items.len()) {
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}
