//! Counter-based random streams.
//!
//! Every random quantity in the crate is a pure function of a key and a
//! counter, so results never depend on how work is split across threads.
//! The mixer is the SplitMix64 finalizer (Stafford's "Mix13" constants);
//! a stream with key `k` yields `mix64(k + (i + 1) * GOLDEN)` as its `i`-th
//! word, which is exactly the SplitMix64 sequence seeded with `k`.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output function.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds a list of words into one key. Order matters; `derive(&[a, b])`
/// and `derive(&[b, a])` are unrelated.
pub fn derive(words: &[u64]) -> u64 {
    words
        .iter()
        .fold(0x6A09_E667_F3BC_C908, |acc, &w| mix64(acc ^ mix64(w.wrapping_add(GOLDEN))))
}

/// A SplitMix64 stream positioned at counter 0.
#[derive(Debug, Clone)]
pub struct Stream {
    key: u64,
    counter: u64,
}

impl Stream {
    pub fn new(key: u64) -> Self {
        Stream { key, counter: 0 }
    }

    /// Stream for clause `index` of a formula generated from `seed`.
    #[inline]
    pub fn for_clause(seed: u64, index: u64) -> Self {
        Stream::new(mix64(seed ^ mix64(index.wrapping_mul(GOLDEN).wrapping_add(1))))
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix64(self.key.wrapping_add(self.counter.wrapping_mul(GOLDEN)))
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[0, bound)` by multiply-high. The bias is at most
    /// `bound / 2^64`.
    #[inline]
    pub fn next_below(&mut self, bound: u64) -> u64 {
        ((self.next_u64() as u128 * bound as u128) >> 64) as u64
    }

    pub fn counter(&self) -> u64 {
        self.counter
    }
}
