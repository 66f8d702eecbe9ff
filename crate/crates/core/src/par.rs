//! Execution policy for the data-parallel loops (search branches, spanning
//! tree scans, sweeps).
//!
//! With the `parallel` feature the [`Execution::Parallel`] policy runs on the
//! rayon global pool; without it every policy degrades to a sequential loop.
//! Both paths return results in input order so outputs never depend on
//! scheduling.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Execution {
    Sequential,
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
    /// True when work will actually be spread over threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }

    /// Maps every item, preserving order.
    pub fn map<T, R, F>(self, items: Vec<T>, f: F) -> Vec<R>
    where
        T: Send,
        R: Send,
        F: Fn(T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return items.into_par_iter().map(f).collect();
        }
        items.into_iter().map(f).collect()
    }

    /// The first (in input order) item for which `f` returns `Some`.
    ///
    /// In parallel mode later items may be evaluated speculatively, but the
    /// result is always the one a sequential scan would return.
    pub fn find_map_first<T, R, F>(self, items: Vec<T>, f: F) -> Option<R>
    where
        T: Send,
        R: Send,
        F: Fn(T) -> Option<R> + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return items.into_par_iter().find_map_first(f);
        }
        items.into_iter().find_map(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_policies_agree() {
        for exec in [Execution::Sequential, Execution::Parallel] {
            let squares = exec.map((0..100).collect(), |x: u64| x * x);
            assert_eq!(squares[7], 49);
            assert_eq!(squares.len(), 100);
            let first =
                exec.find_map_first((0..1000).collect(), |x: u32| (x % 97 == 96).then_some(x));
            assert_eq!(first, Some(96));
        }
    }
}
