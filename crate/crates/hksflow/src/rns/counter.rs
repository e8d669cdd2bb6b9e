use std::sync::atomic::{AtomicU64, Ordering};

/// Tally of modular multiplications and additions performed by the
/// functional kernels, using the same accounting as the closed-form counts:
/// a transform is (N/2)·log2 N butterflies of one mul and one add each, and a
/// basis conversion charges N·α·β muls and N·α·β adds.
#[derive(Debug, Default)]
pub struct OpCounter {
    muls: AtomicU64,
    adds: AtomicU64,
}

impl OpCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_muls(&self, n: u64) {
        self.muls.fetch_add(n, Ordering::Relaxed);
    }

    pub fn add_adds(&self, n: u64) {
        self.adds.fetch_add(n, Ordering::Relaxed);
    }

    pub fn muls(&self) -> u64 {
        self.muls.load(Ordering::Relaxed)
    }

    pub fn adds(&self) -> u64 {
        self.adds.load(Ordering::Relaxed)
    }

    pub fn total(&self) -> u64 {
        self.muls() + self.adds()
    }
}
