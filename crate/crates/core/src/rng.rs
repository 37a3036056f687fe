//! Counter-based deterministic random numbers for sampling sweeps and tests.
//!
//! Sampled verification modes must be byte-reproducible across runs and
//! platforms, so the mapping from (seed, index) to a sample is fixed here
//! once and for all:
//!
//!   sample(seed, i) = splitmix64(seed + (i + 1) · 0x9E3779B97F4A7C15)
//!
//! and a sample is reduced into a range by plain remainder. Nothing here is
//! meant to be cryptographic.

/// One application of the splitmix64 output function.
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The i-th sample of the stream with the given seed.
pub fn sample(seed: u64, i: u64) -> u64 {
    splitmix64(seed.wrapping_add((i.wrapping_add(1)).wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

/// The i-th sample reduced to `0..bound` (bound > 0).
pub fn sample_below(seed: u64, i: u64, bound: u64) -> u64 {
    debug_assert!(bound > 0);
    sample(seed, i) % bound
}

/// A tiny sequential generator for test scaffolding.
#[derive(Clone, Debug)]
pub struct Stream {
    seed: u64,
    i: u64,
}

impl Stream {
    pub fn new(seed: u64) -> Self {
        Stream { seed, i: 0 }
    }

    pub fn next_u64(&mut self) -> u64 {
        let v = sample(self.seed, self.i);
        self.i += 1;
        v
    }

    pub fn below(&mut self, bound: u64) -> u64 {
        self.next_u64() % bound
    }
}
