//! Seed derivation and random streams.
//!
//! Every random quantity in the crate comes from a [`ChaCha8Rng`] seeded with
//! `seed_from_u64(seed)` and switched to one of the fixed [`Stream`]s with
//! `set_stream`. A single run seed therefore feeds three independent streams
//! (landscape, network, search) without the draws of one perturbing another.
//!
//! Run seeds are obtained from an experiment's base seed with [`derive_seed`].

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The concrete generator used throughout the crate.
pub type Rng = ChaCha8Rng;

/// Fixed ChaCha stream identifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Landscape = 1,
    Network = 2,
    Search = 3,
}

/// Generator for `seed` positioned at the start of `stream`.
pub fn stream_rng(seed: u64, stream: Stream) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

/// SplitMix64 output function. A bijection on `u64`.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of run `run_index` at grid point `grid_index` of an experiment.
///
/// The pair is packed into one word (`grid_index` in the high 32 bits), xored
/// with a mixed copy of the base seed and passed through [`mix64`]. Both steps
/// are bijections, so for a fixed `base_seed` distinct pairs with indices below
/// 2^32 never collide.
pub fn derive_seed(base_seed: u64, grid_index: u64, run_index: u64) -> u64 {
    debug_assert!(grid_index < 1 << 32 && run_index < 1 << 32);
    let key = (grid_index << 32) | (run_index & 0xffff_ffff);
    mix64(key ^ mix64(base_seed.wrapping_add(0x9e37_79b9_7f4a_7c15)))
}
