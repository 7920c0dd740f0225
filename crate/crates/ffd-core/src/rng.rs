//! Deterministic random number streams.
//!
//! Every randomized stage of the pipeline (splitting, negative sampling,
//! parameter initialization, shuffling) draws from its own named substream of
//! a single root seed. Stages therefore stay reproducible independently of
//! each other: inserting an extra draw into one stage never perturbs another,
//! and re-running any stage with the same root seed yields identical output.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Mixing constant from the splitmix64 generator.
const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(state: &mut u64) {
    *state = state.wrapping_add(GOLDEN_GAMMA);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    *state = z ^ (z >> 31);
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Deterministic generator for the substream named `label` under `seed`.
pub fn stream(seed: u64, label: &str) -> ChaCha8Rng {
    stream_salted(seed, label, 0)
}

/// Like [`stream`], with an extra numeric salt for per-item streams
/// (e.g. one stream per candidate edge).
pub fn stream_salted(seed: u64, label: &str, salt: u64) -> ChaCha8Rng {
    let mut state = seed ^ fnv1a64(label.as_bytes()).rotate_left(17) ^ salt.wrapping_mul(GOLDEN_GAMMA);
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        splitmix64(&mut state);
        chunk.copy_from_slice(&state.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}
