//! Seeded pseudo-randomness for the sampled checks.
//!
//! SplitMix64 is hand-rolled here so that a given seed produces the same
//! sample stream on every platform and for the life of the project; report
//! reproducibility is part of the CLI contract.

/// SplitMix64 generator (public-domain constants).
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

    /// Uniform value in `[0, n)`. Rejection-free modulo is fine here: `n` is
    /// tiny compared to 2^64, so the bias is far below anything a census
    /// could notice, and determinism is what actually matters.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0);
        self.next_u64() % n
    }

    /// Derive an independent stream for a parallel worker; used to keep
    /// reports identical across parallelism degrees.
    pub fn fork(&self, stream: u64) -> SplitMix64 {
        let mut base = SplitMix64::new(self.state ^ 0xA076_1D64_78BD_642F);
        let lane = base.next_u64() ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
        SplitMix64::new(lane)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_stream() {
        let mut a = SplitMix64::new(42);
        let mut b = SplitMix64::new(42);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn pinned_first_values() {
        // Reference values for seed 0 from the published SplitMix64 stream;
        // a change here would silently break report reproducibility.
        let mut r = SplitMix64::new(0);
        assert_eq!(r.next_u64(), 0xE220_A839_7B1D_CDAF);
        assert_eq!(r.next_u64(), 0x6E78_9E6A_A1B9_65F4);
    }

    #[test]
    fn below_is_in_range() {
        let mut r = SplitMix64::new(7);
        for _ in 0..1000 {
            assert!(r.below(5) < 5);
        }
    }
}
