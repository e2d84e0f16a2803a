//! Deterministic RNG streams.
//!
//! Parallel Monte Carlo work is split into fixed-size blocks; block `b` draws
//! from ChaCha8 stream `b` keyed by a master seed, so results depend only on
//! the seed and block size, never on thread scheduling.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Samples per parallel block.
pub const DEFAULT_BLOCK: usize = 4096;

/// RNG for stream `index` under `master_seed`.
pub fn stream(master_seed: u64, index: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

/// Draw a master seed from a caller-owned RNG.
pub fn derive_master_seed<R: RngCore + ?Sized>(rng: &mut R) -> u64 {
    rng.next_u64()
}

/// Split `total` items into `(block_index, len)` pieces of at most `block`.
pub fn blocks(total: usize, block: usize) -> Vec<(u64, usize)> {
    let block = block.max(1);
    (0..total.div_ceil(block))
        .map(|b| (b as u64, block.min(total - b * block)))
        .collect()
}

/// Uniform draw on `[0, 1)`; tiny wrapper so call sites read clearly.
#[inline]
pub fn unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.random::<f64>()
}
