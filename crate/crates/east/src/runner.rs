use east_core::ReplicaRunner;
use rayon::prelude::*;
use rayon::ThreadPool;

/// Fans replicas out over a rayon pool. Results stay indexed by replica id,
/// so output does not depend on the worker count.
pub struct RayonRunner {
    pool: Option<ThreadPool>,
}

impl RayonRunner {
    /// `threads = 0` uses the global pool.
    pub fn new(threads: usize) -> Result<Self, rayon::ThreadPoolBuildError> {
        let pool = if threads == 0 {
            None
        } else {
            Some(rayon::ThreadPoolBuilder::new().num_threads(threads).build()?)
        };
        Ok(Self { pool })
    }
}

impl Default for RayonRunner {
    fn default() -> Self {
        Self { pool: None }
    }
}

impl ReplicaRunner for RayonRunner {
    fn run<T, F>(&self, replicas: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        let go = || (0..replicas).into_par_iter().map(&f).collect();
        match &self.pool {
            Some(pool) => pool.install(go),
            None => go(),
        }
    }
}
