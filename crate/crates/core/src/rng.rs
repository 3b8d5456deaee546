//! Counter-based random streams.
//!
//! Every random bit of an instance is a pure function of
//! `(seed, row, column block, position in block)`, so any partition of the
//! matrix into work units produces the same bits. The mixing function is
//! the SplitMix64 finalizer; all constants below are part of the on-disk
//! reproducibility contract and must not change.

/// Weyl increment of SplitMix64 (the 64-bit golden ratio).
pub const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const MIX_MUL_1: u64 = 0xBF58_476D_1CE4_E5B9;
const MIX_MUL_2: u64 = 0x94D0_49BB_1331_11EB;

/// SplitMix64 output function, a bijection on `u64`.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(MIX_MUL_1);
    z = (z ^ (z >> 27)).wrapping_mul(MIX_MUL_2);
    z ^ (z >> 31)
}

/// Derives a child seed from `base` and a path of indices.
///
/// `derive_seed(b, &[i, t])` is `mix64(mix64(mix64(b + γ) ^ i) ^ t)` with
/// `γ = GOLDEN_GAMMA`. Distinct paths of the same length give distinct seeds
/// whenever the prefixes agree, since each step is a bijection.
pub fn derive_seed(base: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(mix64(base.wrapping_add(GOLDEN_GAMMA)), |acc, &i| {
            mix64(acc ^ i)
        })
}

/// Precomputed comparison threshold for `Bernoulli(p)` draws on 53-bit uniforms.
///
/// A draw `u` yields a one iff `u >> 11 < ⌊p·2^53⌋`, exact for `p ∈ {0, 1}`
/// and platform independent (scaling by a power of two is exact in IEEE-754).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BernoulliThreshold(u64);

impl BernoulliThreshold {
    pub fn new(p: f64) -> Self {
        debug_assert!((0.0..=1.0).contains(&p));
        BernoulliThreshold((p * (1u64 << 53) as f64) as u64)
    }

    #[inline]
    pub fn accept(self, draw: u64) -> bool {
        (draw >> 11) < self.0
    }
}

/// Key of the SplitMix64 stream that fills word `block` of row `row`.
#[inline]
fn block_key(seed: u64, row: u64, block: u64) -> u64 {
    mix64(mix64(mix64(seed.wrapping_add(GOLDEN_GAMMA)) ^ row) ^ block)
}

/// Fills the low `nbits` bits of a word with independent `Bernoulli(p)` bits
/// for columns `64·block .. 64·block + nbits` of row `row`.
#[inline]
pub fn bernoulli_word(
    seed: u64,
    row: usize,
    block: usize,
    nbits: usize,
    thr: BernoulliThreshold,
) -> u64 {
    debug_assert!(nbits <= 64);
    let key = block_key(seed, row as u64, block as u64);
    let mut word = 0u64;
    let mut state = key;
    for k in 0..nbits {
        state = state.wrapping_add(GOLDEN_GAMMA);
        if thr.accept(mix64(state)) {
            word |= 1 << k;
        }
    }
    word
}
