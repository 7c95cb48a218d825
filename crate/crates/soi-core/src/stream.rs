//! Deterministic, splittable random streams.
//!
//! Draws are keyed by (seed, item index): the generator is positioned at a
//! fixed counter offset per item, so results do not depend on evaluation
//! order or on how work is chunked across threads.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A generator positioned to produce the draws for one item. Each `f64`
/// consumes two 32-bit words, so items are spaced `2 * doubles_per_item`
/// words apart.
pub fn item_rng(seed: u64, index: u64, doubles_per_item: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_word_pos((index as u128) * 2 * doubles_per_item as u128);
    rng
}

/// Derive an independent stream seed from a base seed and a stream tag, so
/// distinct sub-tasks of one run never share draws.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    // SplitMix64 over the combined key.
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
