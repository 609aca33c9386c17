//! Data-parallel helpers with a sequential fallback.
//!
//! Everything here produces identical results in both modes: work items are
//! independent and results are collected in input order.

/// Execution strategy for batch workloads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    /// Uses rayon when the `parallel` feature is enabled, sequential otherwise.
    #[default]
    Parallel,
}

impl Exec {
    /// Whether this mode actually fans out across threads in the current build.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }
}

/// Maps `f` over `items`, preserving order.
pub fn map<T, R, F>(exec: Exec, items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec == Exec::Parallel {
        use rayon::prelude::*;
        return items.into_par_iter().map(f).collect();
    }
    let _ = exec;
    items.into_iter().map(f).collect()
}

/// Runs `op` with at most `jobs` worker threads.
///
/// `jobs == 0` means "use the default pool". Without the `parallel` feature this
/// simply calls `op`.
pub fn with_jobs<R: Send>(jobs: usize, op: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    if jobs > 0 {
        if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
            return pool.install(op);
        }
    }
    let _ = jobs;
    op()
}
