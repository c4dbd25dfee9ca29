//! Deterministic random-number plumbing shared by the shuffle and noise paths.
//!
//! Everything downstream of a user-supplied seed is pinned here so that
//! manifests and noise variants are reproducible across platforms and
//! library versions:
//!
//! * a 64-bit seed expands to a ChaCha8 key through four outputs of the
//!   SplitMix64 stream starting at that seed;
//! * bounded draws use plain rejection sampling on `next_u64`, never a
//!   library-provided range distribution;
//! * per-variant seeds are consecutive outputs of the SplitMix64 stream.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Identifier written into manifests so the shuffle recipe is auditable.
pub const GENERATOR_ID: &str = "chacha8-fisher-yates-v1";

const SPLITMIX64_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64_mix(state: u64) -> u64 {
    let mut z = state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The i-th output (0-based) of the SplitMix64 stream seeded at `seed`.
pub(crate) fn splitmix64_stream(seed: u64, i: u64) -> u64 {
    splitmix64_mix(seed.wrapping_add((i.wrapping_add(1)).wrapping_mul(SPLITMIX64_GAMMA)))
}

/// ChaCha8 generator keyed from a 64-bit seed via SplitMix64 expansion.
pub(crate) fn chacha8_from_seed(seed: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    for (i, chunk) in key.chunks_exact_mut(8).enumerate() {
        chunk.copy_from_slice(&splitmix64_stream(seed, i as u64).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// Uniform draw from `[0, bound)` by rejection sampling on `next_u64`.
pub(crate) fn uniform_u64(rng: &mut ChaCha8Rng, bound: u64) -> u64 {
    debug_assert!(bound >= 1);
    // Accept v < k*bound where k = floor(2^64 / bound); k*bound - 1 == u64::MAX - r
    // with r = 2^64 mod bound.
    let rem = ((u64::MAX % bound) + 1) % bound;
    let zone = u64::MAX - rem;
    loop {
        let v = rng.next_u64();
        if v <= zone {
            return v % bound;
        }
    }
}

/// In-place Fisher–Yates shuffle, descending traversal, draws via [`uniform_u64`].
pub(crate) fn shuffle<T>(rng: &mut ChaCha8Rng, items: &mut [T]) {
    for i in (1..items.len()).rev() {
        let j = uniform_u64(rng, i as u64 + 1) as usize;
        items.swap(i, j);
    }
}
