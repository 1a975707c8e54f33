//! Resource caps shared by the exhaustive searches.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::{Duration, Instant};

/// Node and wall-clock limits. Cheap to poll from many threads.
#[derive(Debug)]
pub struct Budget {
    max_nodes: u64,
    deadline: Option<Instant>,
    nodes: AtomicU64,
    tripped: AtomicBool,
}

impl Budget {
    pub fn new(max_nodes: Option<u64>, timeout: Option<Duration>) -> Self {
        Self {
            max_nodes: max_nodes.unwrap_or(u64::MAX),
            deadline: timeout.map(|t| Instant::now() + t),
            nodes: AtomicU64::new(0),
            tripped: AtomicBool::new(false),
        }
    }

    pub fn unlimited() -> Self {
        Self::new(None, None)
    }

    /// Counts `n` search nodes; returns false once any limit is exceeded.
    #[inline]
    pub fn charge(&self, n: u64) -> bool {
        if self.tripped.load(Ordering::Relaxed) {
            return false;
        }
        let used = self.nodes.fetch_add(n, Ordering::Relaxed) + n;
        let over = used > self.max_nodes
            || (used & 0x3ff < n && self.deadline.is_some_and(|d| Instant::now() >= d));
        if over {
            self.tripped.store(true, Ordering::Relaxed);
        }
        !over
    }

    pub fn exhausted(&self) -> bool {
        self.tripped.load(Ordering::Relaxed)
            || self.deadline.is_some_and(|d| Instant::now() >= d)
    }

    pub fn nodes(&self) -> u64 {
        self.nodes.load(Ordering::Relaxed)
    }
}

impl Default for Budget {
    fn default() -> Self {
        Self::unlimited()
    }
}
