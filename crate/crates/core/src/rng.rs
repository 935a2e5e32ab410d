//! Deterministic random streams.
//!
//! Every random quantity in the crate is drawn from a stream identified by
//! `(seed, domain, a, b)`. The key is derived by a splitmix64 chain, so any
//! stream can be built directly without touching its neighbours. This is what
//! makes pool generation and replicate loops independent of the rayon
//! schedule.

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

pub type StreamRng = Xoshiro256PlusPlus;

/// Stream domains. Distinct domains never share a key for the same indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Domain {
    /// One stream per exact (naive) tree sample, indexed by replicate.
    ExactTree = 1,
    /// Level-0 pool draws, indexed by entry.
    PoolInit = 2,
    /// Generic-vector draws for pool entry `(level, i)`.
    PoolVector = 3,
    /// Resampling indices for pool entry `(level, i)`.
    PoolIndex = 4,
    /// Per-replicate seeds for repeated experiments.
    Replicate = 5,
    /// Anything test- or tool-specific that needs its own stream family.
    Auxiliary = 6,
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes the stream coordinates into a single 64-bit key.
pub fn stream_key(seed: u64, domain: Domain, a: u64, b: u64) -> u64 {
    let mut h = splitmix64(seed);
    h = splitmix64(h ^ domain as u64);
    h = splitmix64(h ^ a);
    splitmix64(h ^ b.rotate_left(32))
}

pub fn stream(seed: u64, domain: Domain, a: u64, b: u64) -> StreamRng {
    StreamRng::seed_from_u64(stream_key(seed, domain, a, b))
}

/// Seed for replicate `rep` of an experiment seeded with `seed`.
pub fn replicate_seed(seed: u64, rep: u64) -> u64 {
    stream_key(seed, Domain::Replicate, rep, 0)
}

/// Uniform on the half-open interval `[0, 1)` with 53 bits of precision.
#[inline]
pub fn unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform on `(0, 1]`, for inversion formulas that take a logarithm.
#[inline]
pub fn unit_open_closed<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    1.0 - unit(rng)
}
