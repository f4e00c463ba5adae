//! Execution policy for the data-parallel inner loops.
//!
//! Every loop routed through [`ExecPolicy`] is a pure map over independent
//! indices, so the parallel and sequential paths produce bitwise identical
//! results. Reductions are never split across threads.
//!
//! The parallel path needs the `parallel` cargo feature (on by default).
//! Without it [`ExecPolicy::Parallel`] silently degrades to sequential.

/// Below this many work items a parallel request runs sequentially.
pub const MIN_PARALLEL_LEN: usize = 2048;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExecPolicy {
    Sequential,
    Parallel,
}

impl Default for ExecPolicy {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            ExecPolicy::Parallel
        } else {
            ExecPolicy::Sequential
        }
    }
}

impl ExecPolicy {
    /// Whether work of `len` items actually runs on the thread pool.
    pub fn is_parallel_for(self, len: usize) -> bool {
        cfg!(feature = "parallel") && self == ExecPolicy::Parallel && len >= MIN_PARALLEL_LEN
    }

    /// `out[k] = f(k)` for every index.
    pub fn fill<F>(self, out: &mut [f64], f: F)
    where
        F: Fn(usize) -> f64 + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel_for(out.len()) {
            use rayon::prelude::*;
            out.par_iter_mut().enumerate().for_each(|(k, v)| *v = f(k));
            return;
        }
        for (k, v) in out.iter_mut().enumerate() {
            *v = f(k);
        }
    }

    /// Collects `f(k)` for `k in 0..n`, preserving order.
    pub fn map_range<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel_for(n) {
            use rayon::prelude::*;
            return (0..n).into_par_iter().map(f).collect();
        }
        (0..n).map(f).collect()
    }

    /// Like [`map_range`](Self::map_range) but for a handful of coarse tasks
    /// (one per field or matrix row); parallel whenever the policy allows.
    pub fn map_tasks<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == ExecPolicy::Parallel && n > 1 {
            use rayon::prelude::*;
            return (0..n).into_par_iter().map(f).collect();
        }
        (0..n).map(f).collect()
    }

    /// Runs `f(chunk_index, chunk)` over consecutive chunks of `data`.
    pub fn for_each_chunk_mut<T, F>(self, data: &mut [T], chunk: usize, f: F)
    where
        T: Send,
        F: Fn(usize, &mut [T]) + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel_for(data.len()) {
            use rayon::prelude::*;
            data.par_chunks_mut(chunk).enumerate().for_each(|(k, c)| f(k, c));
            return;
        }
        for (k, c) in data.chunks_mut(chunk).enumerate() {
            f(k, c);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn policies_agree_bitwise() {
        let n = 10_000;
        let f = |k: usize| ((k as f64) * 0.37).sin().exp();
        let mut a = vec![0.0; n];
        let mut b = vec![0.0; n];
        ExecPolicy::Sequential.fill(&mut a, f);
        ExecPolicy::Parallel.fill(&mut b, f);
        assert_eq!(a, b);
        let c = ExecPolicy::Parallel.map_range(n, f);
        assert_eq!(a, c);
    }

    #[test]
    fn chunked_visit_covers_everything() {
        let mut data = vec![0usize; 5000];
        ExecPolicy::Parallel.for_each_chunk_mut(&mut data, 100, |k, c| {
            for (j, v) in c.iter_mut().enumerate() {
                *v = k * 100 + j;
            }
        });
        assert!(data.iter().enumerate().all(|(i, v)| i == *v));
    }
}
