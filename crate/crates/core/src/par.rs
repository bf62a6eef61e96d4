//! Ordered data-parallel map with a sequential fallback.
//!
//! With the `parallel` feature (default) work is spread over the rayon pool;
//! without it everything runs on the calling thread. Results always come back
//! in index order, so reductions over them are independent of scheduling.

/// Applies `f` to `0..count` and collects the results in index order.
pub fn map_indexed<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..count).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_indexed_sequential(count, f)
    }
}

/// Sequential reference path, always available.
pub fn map_indexed_sequential<T, F>(count: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..count).map(f).collect()
}

/// Which path a batch of independent work items takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    /// Rayon pool when the `parallel` feature is on, otherwise sequential.
    #[default]
    Parallel,
    Sequential,
}

impl Execution {
    pub fn map_indexed<T, F>(self, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            Execution::Parallel => map_indexed(count, f),
            Execution::Sequential => map_indexed_sequential(count, f),
        }
    }
}

/// Configures the global worker count. `0` keeps the rayon default.
/// Returns false when the pool was already initialised or parallelism is
/// compiled out.
pub fn set_threads(jobs: usize) -> bool {
    #[cfg(feature = "parallel")]
    {
        if jobs == 0 {
            return true;
        }
        rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global().is_ok()
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = jobs;
        false
    }
}
