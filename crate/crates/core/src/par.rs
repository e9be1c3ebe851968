//! Indexed map that runs on rayon when the `parallel` feature is enabled.
//!
//! Results are always collected in index order, so the parallel and
//! sequential paths return identical vectors.

/// Execution mode for data-parallel inner loops.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exec {
    #[default]
    Parallel,
    Sequential,
}

impl Exec {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }
}

/// `(0..n).map(f).collect()`, possibly in parallel.
pub fn map_indexed<T, F>(n: usize, exec: Exec, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() && n > 1 {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..n).map(f).collect()
}

/// Configures the global worker pool from `ARS_MOBOPT_THREADS`, if set.
/// Returns the thread cap that was applied.
pub fn init_thread_pool_from_env() -> Option<usize> {
    let threads = std::env::var("ARS_MOBOPT_THREADS")
        .ok()?
        .trim()
        .parse::<usize>()
        .ok()
        .filter(|&t| t > 0)?;
    #[cfg(feature = "parallel")]
    {
        // Fails only if the global pool was already built; the cap then stays as it was.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    Some(threads)
}
