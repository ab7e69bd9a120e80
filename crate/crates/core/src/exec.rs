//! Data-parallel loops with a sequential fallback.
//!
//! With the `parallel` feature (on by default) index ranges are sharded over
//! rayon's pool; without it, or with [`Execution::Sequential`], they run in a
//! plain loop. Both paths return identical results: maps preserve index
//! order and searches report the smallest matching index.

/// How index-range loops are executed.
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
    /// `f(0), f(1), …, f(n-1)` in index order.
    pub fn map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                (0..n).into_par_iter().map(f).collect()
            }
            _ => (0..n).map(f).collect(),
        }
    }

    /// Like [`map`](Self::map) but stops at the first error (lowest index wins).
    pub fn try_map<T, E, F>(self, n: usize, f: F) -> Result<Vec<T>, E>
    where
        T: Send,
        E: Send,
        F: Fn(usize) -> Result<T, E> + Sync + Send,
    {
        self.map(n, f).into_iter().collect()
    }

    /// Smallest index for which `f` returns `Some`, together with the value.
    pub fn find_first<T, F>(self, n: usize, f: F) -> Option<(usize, T)>
    where
        T: Send,
        F: Fn(usize) -> Option<T> + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                (0..n).into_par_iter().find_map_first(|i| f(i).map(|v| (i, v)))
            }
            _ => (0..n).find_map(|i| f(i).map(|v| (i, v))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_paths_agree() {
        for exec in [Execution::Sequential, Execution::Parallel] {
            assert_eq!(exec.map(5, |i| i * i), vec![0, 1, 4, 9, 16]);
            let hit = exec.find_first(1000, |i| (i % 37 == 36).then_some(i * 2));
            assert_eq!(hit, Some((36, 72)));
            let err: Result<Vec<usize>, usize> = exec.try_map(10, |i| if i >= 4 { Err(i) } else { Ok(i) });
            assert_eq!(err, Err(4));
        }
    }
}
