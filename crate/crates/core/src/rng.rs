//! Random streams.
//!
//! Every random draw in the crate goes through an explicit `&mut impl Rng`.
//! Experiments derive one ChaCha8 stream per trial: the key is the master
//! seed and the 64-bit stream id packs `(n, k, trial)` as
//! `n << 48 | k << 32 | trial`. A trial can therefore be replayed in
//! isolation, and results do not depend on scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

pub fn stream_id(n: usize, k: usize, trial: usize) -> u64 {
    ((n as u64 & 0xffff) << 48) | ((k as u64 & 0xffff) << 32) | (trial as u64 & 0xffff_ffff)
}

pub fn stream(master_seed: u64, stream_id: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream_id);
    rng
}

pub fn trial_rng(master_seed: u64, n: usize, k: usize, trial: usize) -> StreamRng {
    stream(master_seed, stream_id(n, k, trial))
}
