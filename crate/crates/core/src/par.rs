//! Order-preserving data parallelism. With the `parallel` feature work is
//! spread over a rayon pool; without it, or with one worker, it runs on the
//! calling thread. Results are always returned in index order so reductions
//! downstream are deterministic.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Workers(pub usize);

impl Default for Workers {
    /// All available cores.
    fn default() -> Self {
        Workers(0)
    }
}

impl Workers {
    pub const SEQUENTIAL: Workers = Workers(1);

    pub fn is_sequential(self) -> bool {
        self.0 == 1 || !cfg!(feature = "parallel")
    }

    /// `f(0), …, f(n - 1)` in order.
    pub fn map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Send + Sync,
    {
        if self.is_sequential() || n <= 1 {
            return (0..n).map(f).collect();
        }
        self.parallel_map(n, f)
    }

    #[cfg(feature = "parallel")]
    fn parallel_map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Send + Sync,
    {
        use rayon::prelude::*;
        let run = || (0..n).into_par_iter().map(&f).collect();
        if self.0 == 0 {
            return run();
        }
        match rayon::ThreadPoolBuilder::new().num_threads(self.0).build() {
            Ok(pool) => pool.install(run),
            Err(_) => run(),
        }
    }

    #[cfg(not(feature = "parallel"))]
    fn parallel_map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Send + Sync,
    {
        (0..n).map(f).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_and_sequential_agree() {
        let f = |i: usize| (i * i) % 7;
        let seq = Workers::SEQUENTIAL.map(1000, f);
        assert_eq!(Workers::default().map(1000, f), seq);
        assert_eq!(Workers(3).map(1000, f), seq);
        assert!(Workers(2).map(0, f).is_empty());
    }
}
