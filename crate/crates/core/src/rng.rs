//! Seed derivation for deterministic, order-independent random streams.
//!
//! Every stochastic component of the simulator draws from a
//! [`ChaCha12Rng`] whose 256-bit seed is derived from a `(master seed,
//! stream label, index)` triple. Streams for distinct triples are
//! statistically independent, so trials can be evaluated in any order (or
//! concurrently) without changing results.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Stream labels keep unrelated consumers of the same master seed apart.
pub mod stream {
    pub const PLACEMENT: u64 = 1;
    pub const SHADOWING: u64 = 2;
    pub const ALLOC_EVENTS: u64 = 3;
    pub const FADING: u64 = 4;
}

// splitmix64: small, well-mixed expander used only for seed derivation.
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives an independent RNG for `(master, label, index)`.
pub fn derive_rng(master: u64, label: u64, index: u64) -> ChaCha12Rng {
    let mut state = master ^ label.rotate_left(24) ^ index.rotate_left(48);
    let mut seed = [0u8; 32];
    for chunk in seed.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha12Rng::from_seed(seed)
}
