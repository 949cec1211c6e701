//! Per-population fan-out with a thread cap.

use std::thread;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "MFG_EGTA_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Concurrency {
    threads: usize,
}

impl Concurrency {
    pub fn sequential() -> Self {
        Self { threads: 1 }
    }

    pub fn with_threads(threads: usize) -> Self {
        Self {
            threads: threads.max(1),
        }
    }

    /// Available parallelism, capped by `MFG_EGTA_THREADS` when set.
    pub fn from_env() -> Self {
        let available = thread::available_parallelism().map_or(1, |n| n.get());
        let cap = std::env::var(THREADS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .unwrap_or(available);
        Self::with_threads(cap.min(available))
    }

    pub fn threads(&self) -> usize {
        self.threads
    }

    /// Evaluates `f(0..n)` and returns the results in index order.
    pub fn map<R, F>(&self, n: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync,
    {
        if self.threads <= 1 || n <= 1 {
            return (0..n).map(f).collect();
        }
        let workers = self.threads.min(n);
        let f = &f;
        let mut out: Vec<(usize, R)> = thread::scope(|scope| {
            let handles: Vec<_> = (0..workers)
                .map(|w| {
                    scope.spawn(move || {
                        (w..n)
                            .step_by(workers)
                            .map(|i| (i, f(i)))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("population worker panicked"))
                .collect()
        });
        out.sort_by_key(|(i, _)| *i);
        out.into_iter().map(|(_, r)| r).collect()
    }
}

impl Default for Concurrency {
    fn default() -> Self {
        Self::from_env()
    }
}
