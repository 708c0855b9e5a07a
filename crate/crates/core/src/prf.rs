//! A counter-based pseudorandom function keyed by tuples of 64-bit words.
//!
//! Keys are folded through the SplitMix64 finalizer one word at a time; a
//! stream then emits `mix(key + counter * GAMMA)`. Nothing is stateful beyond
//! the counter, so any node of a scramble tree or any replicate can be
//! regenerated independently.

/// Domain tags separating the uses of the PRF.
pub mod tag {
    pub const NESTED: u64 = 0x6e65_7374_6564_0001;
    pub const LINEAR_MATRIX: u64 = 0x6c69_6e65_6172_0002;
    pub const LINEAR_SHIFT: u64 = 0x7368_6966_7400_0003;
    pub const NESTED_TAIL: u64 = 0x7461_696c_0000_0004;
    pub const MONTE_CARLO: u64 = 0x6d63_0000_0000_0005;
}

const GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds `words` into a single 64-bit key.
pub fn derive_key(words: &[u64]) -> u64 {
    words.iter().fold(0x243f_6a88_85a3_08d3, |h, &w| mix64(h.wrapping_add(GAMMA) ^ mix64(w.wrapping_add(GAMMA))))
}

/// Sequential outputs of the PRF under one key.
#[derive(Clone, Debug)]
pub struct KeyedStream {
    key: u64,
    counter: u64,
}

impl KeyedStream {
    pub fn new(words: &[u64]) -> KeyedStream {
        KeyedStream { key: derive_key(words), counter: 0 }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix64(self.key.wrapping_add(self.counter.wrapping_mul(GAMMA)))
    }

    /// Exactly uniform on `0..bound` (multiply-shift with rejection of the biased zone).
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "empty range");
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let m = (self.next_u64() as u128) * (bound as u128);
            if (m as u64) >= threshold {
                return (m >> 64) as u64;
            }
        }
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// A uniform random permutation of `0..n` by Fisher–Yates.
    pub fn permutation(&mut self, n: usize) -> Vec<u64> {
        let mut perm: Vec<u64> = (0..n as u64).collect();
        for i in (1..n).rev() {
            let j = self.below(i as u64 + 1) as usize;
            perm.swap(i, j);
        }
        perm
    }
}

/// One uniform draw on `0..bound` under the key `words`.
pub fn uniform_below(words: &[u64], bound: u64) -> u64 {
    KeyedStream::new(words).below(bound)
}
