//! Seeded randomness.
//!
//! Every random draw in the crate comes from ChaCha8 (`rand_chacha::ChaCha8Rng`)
//! seeded with `seed_from_u64`. Independent consumers get their own ChaCha
//! stream id instead of a derived seed, so a single user seed fans out into
//! reproducible, non-overlapping sequences on every platform. Integers are
//! drawn as `u64` and floats are built from raw bits, so results do not
//! depend on pointer width.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type SeededRng = ChaCha8Rng;

/// Stream ids reserved per consumer.
pub(crate) mod streams {
    pub const INIT: u64 = 1;
    pub const SCHEDULE: u64 = 2;
    pub const NEGATIVES: u64 = 3;
    /// Tree `t` of a forest uses stream `TREE_BASE + t`.
    pub const TREE_BASE: u64 = 1 << 32;
}

pub fn seeded(seed: u64, stream: u64) -> SeededRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform in `[0, 1)` with 53 random bits.
#[inline]
pub fn unit_f64(rng: &mut SeededRng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform in `[0, 1)` with 24 random bits.
#[inline]
pub fn unit_f32(rng: &mut SeededRng) -> f32 {
    (rng.next_u32() >> 8) as f32 * (1.0 / (1u32 << 24) as f32)
}

/// Uniform integer in `0..n`. `n` must be nonzero.
#[inline]
pub fn below(rng: &mut SeededRng, n: usize) -> usize {
    rng.random_range(0..n as u64) as usize
}

#[inline]
pub fn coin(rng: &mut SeededRng) -> bool {
    rng.next_u32() & 1 == 1
}
