//! Self-contained deterministic pseudo-random numbers.
//!
//! Simulation reproducibility across platforms and thread counts requires a
//! generator whose output is fully specified here rather than inherited from
//! an external crate. [`SplitMix64`] is the 64-bit mixer of Steele, Lea and
//! Flood: state advances by the golden-ratio increment `0x9E3779B97F4A7C15`
//! and each output is the finalizer [`mix64`].

/// Finalizing mixer: `z += 0x9E3779B97F4A7C15` has already been applied by the
/// caller; this scrambles the counter into an output word.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Seed for episode `index` of a run with the given master seed.
///
/// Defined as `mix64(master ^ mix64(index + 1))`, so episodes may be played
/// in any order (or in parallel) and still draw identical move sequences.
#[inline]
pub fn episode_seed(master_seed: u64, index: u64) -> u64 {
    mix64(master_seed ^ mix64(index.wrapping_add(1)))
}

/// SplitMix64 generator.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
        mix64(self.state)
    }

    /// Uniform draw in `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw from `0..bound` (`bound > 0`) by rejection-free scaling.
    pub fn next_below(&mut self, bound: usize) -> usize {
        debug_assert!(bound > 0);
        let b = bound as f64;
        let idx = (self.next_f64() * b) as usize;
        idx.min(bound - 1)
    }
}
