//! Sequential / data-parallel evaluation switch.
//!
//! Every heavy loop in the crate (pattern grids, measurement sweeps, oracle
//! batches) maps an index range to independent results. With the `parallel`
//! feature the map runs on the rayon pool; without it, or when
//! [`Execution::Sequential`] is requested, it runs in a plain loop. Both
//! paths return results in index order and evaluate each item with the same
//! arithmetic, so outputs are bitwise identical.

/// How an index-parallel map is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Falls back to sequential when the `parallel` feature is disabled.
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

impl Execution {
    /// True when this mode actually fans out to worker threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }

    pub(crate) fn map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Execution::Parallel {
            use rayon::prelude::*;
            return (0..n).into_par_iter().map(f).collect();
        }
        (0..n).map(f).collect()
    }
}
