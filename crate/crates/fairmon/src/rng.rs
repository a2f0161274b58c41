//! Deterministic pseudo-random numbers for the cohort simulator and tests.
//!
//! The generator is SplitMix64 with the usual constants
//! (`0x9E3779B97F4A7C15`, `0xBF58476D1CE4E5B9`, `0x94D049BB133111EB`).
//! Floating-point draws are derived from the top 53 bits of each output
//! word, so a given seed produces the same stream on every platform.

/// SplitMix64 generator.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform draw in `[0, 1)` using the top 53 bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Approximate standard normal: sum of 12 uniforms minus 6 (Irwin-Hall).
    ///
    /// Uses only additions of exactly specified uniform draws, so the value
    /// is bit-identical across platforms. Support is [-6, 6], which is wide
    /// enough for cohort simulation.
    pub fn next_standard_normal(&mut self) -> f64 {
        let mut sum = 0.0;
        for _ in 0..12 {
            sum += self.next_f64();
        }
        sum - 6.0
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }

    /// Index drawn from non-negative weights (need not be normalised).
    ///
    /// Consumes exactly one uniform draw. Falls back to the last index when
    /// rounding leaves the draw above the cumulative total.
    pub fn categorical(&mut self, weights: &[f64]) -> usize {
        debug_assert!(!weights.is_empty());
        let total: f64 = weights.iter().sum();
        let mut target = self.next_f64() * total;
        for (i, w) in weights.iter().enumerate() {
            if target < *w {
                return i;
            }
            target -= w;
        }
        weights.len() - 1
    }

    /// Uniform integer in `[0, bound)` by scaling a 53-bit uniform draw.
    pub fn next_index(&mut self, bound: usize) -> usize {
        debug_assert!(bound > 0);
        let idx = (self.next_f64() * bound as f64) as usize;
        idx.min(bound - 1)
    }
}
