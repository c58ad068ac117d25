//! Deterministic seed derivation.
//!
//! Every stochastic operation takes an explicit master seed and derives
//! per-stream sub-seeds through `sub_seed`, so replicates can be generated
//! in any order (or in parallel) without changing results. The exact
//! splitting function is part of the reproducibility contract and is
//! recorded in run manifests:
//!
//! ```text
//! sub_seed(master, stream) = splitmix64(master + (stream + 1) * 0x9E3779B97F4A7C15)
//! ```

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer (Steele, Lea, Flood 2014).
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive the sub-seed for an indexed stream (replicate, stage, ...).
pub fn sub_seed(master: u64, stream: u64) -> u64 {
    splitmix64(master.wrapping_add(stream.wrapping_add(1).wrapping_mul(GOLDEN)))
}

/// Derive a named stream seed, e.g. one per experiment stage.
pub fn named_seed(master: u64, name: &str) -> u64 {
    // FNV-1a over the name, then mixed with the master.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    sub_seed(master, h)
}

/// Fresh deterministic generator for stream `stream` under `master`.
pub fn rng_for(master: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(sub_seed(master, stream))
}
