//! Hook for running independent work items concurrently.
//!
//! The core crate has no threads; callers with `std` plug in an implementation.

use alloc::vec::Vec;

/// Maps `f` over `0..n`, returning results in index order.
pub trait Parallel: Sync {
    fn map<T: Send>(&self, n: usize, f: &(dyn Fn(usize) -> T + Sync)) -> Vec<T>;
}

/// Runs everything on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Serial;

impl Parallel for Serial {
    fn map<T: Send>(&self, n: usize, f: &(dyn Fn(usize) -> T + Sync)) -> Vec<T> {
        (0..n).map(f).collect()
    }
}
