//! Counter-based random streams.
//!
//! Every draw in a sampling chain is addressed by `(seed, chain, step)`, so
//! the noise a chain sees never depends on evaluation order, thread count, or
//! how many guidance terms were computed in between.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Stream tags keep independent uses of the same seed apart.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    InitialLatent = 1,
    StepNoise = 2,
    Data = 3,
    Init = 4,
    Batch = 5,
    Diffuse = 6,
    Split = 7,
    Vlb = 8,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a seed and a tuple of counters into one 64-bit key.
pub fn mix(seed: u64, stream: Stream, a: u64, b: u64) -> u64 {
    let mut h = splitmix64(seed ^ 0xD1B5_4A32_D192_ED03);
    h = splitmix64(h ^ (stream as u64));
    h = splitmix64(h ^ a);
    splitmix64(h ^ b)
}

/// A fresh generator for the counter `(seed, stream, a, b)`.
pub fn stream_rng(seed: u64, stream: Stream, a: u64, b: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix(seed, stream, a, b))
}

/// `dim` standard-normal draws addressed by `(seed, stream, a, b)`.
pub fn normal_vec(seed: u64, stream: Stream, a: u64, b: u64, dim: usize) -> Vec<f64> {
    let mut rng = stream_rng(seed, stream, a, b);
    (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect()
}
