//! Engine-wide knobs and the index schedule used to probe sequences.

use serde::Serialize;

pub const DEFAULT_TRUNC: i32 = 16;
pub const DEFAULT_DEPTH: u32 = 14;
/// Sequence predicates that stay inconclusive are re-sampled on deeper
/// schedules, one exponent at a time, up to this depth.
pub const DEFAULT_MAX_DEPTH: u32 = 32;
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Settings {
    /// Absolute truncation order T: series results are exact up to ∂^T.
    pub trunc: i32,
    /// Schedule exponent K: indices 2^0 ..= 2^K plus odd neighbours.
    pub depth: u32,
    pub max_depth: u32,
    /// Agreement tolerance for approximate results.
    pub tol: f64,
    pub seed: u64,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            trunc: DEFAULT_TRUNC,
            depth: DEFAULT_DEPTH,
            max_depth: DEFAULT_MAX_DEPTH,
            tol: DEFAULT_TOL,
            seed: 0,
        }
    }
}

impl Settings {
    pub fn with_trunc(mut self, trunc: i32) -> Self {
        self.trunc = trunc;
        self
    }

    pub fn with_depth(mut self, depth: u32) -> Self {
        self.depth = depth;
        self.max_depth = self.max_depth.max(depth);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn schedule(&self) -> Schedule {
        Schedule::new(self.depth)
    }

    /// Depths tried in order by escalating predicates.
    pub fn depth_ladder(&self) -> impl Iterator<Item = u32> {
        self.depth..=self.max_depth.max(self.depth)
    }
}

/// Sorted sample indices: 2^k for k = 0..=K, plus 2^k + 1 for the eight
/// largest k (odd indices, so both parities are always represented).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schedule {
    depth: u32,
    indices: Vec<u64>,
}

impl Schedule {
    pub fn new(depth: u32) -> Self {
        assert!(depth <= 62, "schedule depth {depth} overflows u64 indices");
        let mut indices: Vec<u64> = (0..=depth).map(|k| 1u64 << k).collect();
        let lo = depth.saturating_sub(7).max(1);
        if depth >= 1 {
            indices.extend((lo..=depth).map(|k| (1u64 << k) + 1));
        }
        indices.sort_unstable();
        indices.dedup();
        Schedule { depth, indices }
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn indices(&self) -> &[u64] {
        &self.indices
    }

    pub fn max_index(&self) -> u64 {
        *self.indices.last().expect("schedule is never empty")
    }

    /// The last `count` indices.
    pub fn tail(&self, count: usize) -> &[u64] {
        let n = self.indices.len();
        &self.indices[n.saturating_sub(count)..]
    }
}
