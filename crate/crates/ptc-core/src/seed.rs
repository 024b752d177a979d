//! Deterministic seed derivation for parallel Monte Carlo work.
//!
//! Every trial derives its own RNG from the master seed and its coordinates
//! (grid index, run index, realization index, …). Results therefore never
//! depend on how trials are scheduled across worker threads, and any single
//! trial can be reproduced in isolation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Odd multiplier giving distinct streams for consecutive coordinates.
const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer: a bijective 64-bit mix with full avalanche.
fn mix(z: u64) -> u64 {
    let mut z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from a master seed and a coordinate path.
pub fn derive_seed(master: u64, ids: &[u64]) -> u64 {
    let mut s = mix(master);
    for &id in ids {
        s = mix(s ^ id.wrapping_mul(GOLDEN));
    }
    s
}

/// Builds the RNG for one unit of work identified by its coordinate path.
pub fn rng_for(master: u64, ids: &[u64]) -> ChaCha8Rng {
    let mut s = derive_seed(master, ids);
    let mut bytes = [0u8; 32];
    for chunk in bytes.chunks_exact_mut(8) {
        s = mix(s);
        chunk.copy_from_slice(&s.to_le_bytes());
    }
    ChaCha8Rng::from_seed(bytes)
}
