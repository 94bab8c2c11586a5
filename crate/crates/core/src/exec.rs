//! Data-parallel execution with a sequential fallback.
//!
//! Batch workloads (level tables, random sweeps, sample checks, closure
//! frontiers) go through [`Execution`]. Without the `parallel` feature every
//! mode runs sequentially; results are always returned in input order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
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
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }

    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }

    pub fn map_range<R, F>(self, range: std::ops::Range<u64>, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(u64) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return range.into_par_iter().map(f).collect();
        }
        range.map(f).collect()
    }

    pub fn flat_map<T, R, I, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        I: IntoIterator<Item = R>,
        F: Fn(&T) -> I + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return items.par_iter().flat_map_iter(f).collect();
        }
        items.iter().flat_map(f).collect()
    }

    /// Maps `f` over `range` in chunks and folds the per-chunk results with `merge`.
    pub fn fold_range<A, F, M>(self, range: std::ops::Range<u64>, chunk: u64, f: F, merge: M) -> Option<A>
    where
        A: Send,
        F: Fn(std::ops::Range<u64>) -> A + Sync + Send,
        M: Fn(A, A) -> A + Sync + Send,
    {
        let chunk = chunk.max(1);
        let starts: Vec<u64> = (range.start..range.end).step_by(chunk as usize).collect();
        let parts = self.map(&starts, |&s| f(s..(s + chunk).min(range.end)));
        parts.into_iter().reduce(merge)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let items: Vec<u64> = (0..1000).collect();
        let seq = Execution::Sequential.map(&items, |x| x * x);
        let par = Execution::Parallel.map(&items, |x| x * x);
        assert_eq!(seq, par);
        let seq = Execution::Sequential.flat_map(&items, |&x| vec![x; (x % 3) as usize]);
        let par = Execution::Parallel.flat_map(&items, |&x| vec![x; (x % 3) as usize]);
        assert_eq!(seq, par);
        let total = Execution::Parallel
            .fold_range(0..1001, 37, |r| r.sum::<u64>(), |a, b| a + b)
            .unwrap();
        assert_eq!(total, 500500);
    }
}
