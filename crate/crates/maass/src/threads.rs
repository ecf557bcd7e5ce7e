//! Thread pool behind the core crate's `Parallel` hook.

use std::sync::Arc;

use maass_core::parallel::Parallel;
use rayon::prelude::*;

#[derive(Clone)]
pub struct RayonParallel {
    pool: Arc<rayon::ThreadPool>,
}

impl RayonParallel {
    /// `threads = 0` lets rayon pick one thread per core.
    pub fn new(threads: usize) -> anyhow::Result<Self> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
        Ok(RayonParallel { pool: Arc::new(pool) })
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl Parallel for RayonParallel {
    fn map<T: Send>(&self, n: usize, f: &(dyn Fn(usize) -> T + Sync)) -> Vec<T> {
        self.pool.install(|| (0..n).into_par_iter().map(f).collect())
    }
}
