//! Deterministic seeding.
//!
//! Every random quantity in the crate is a pure function of a 64-bit seed.
//! Replica `r` of an experiment with master seed `m` draws from
//! `replica_seed(m, r)`; independent sub-streams of a replica (walk, scenery,
//! calibration, ...) are split off with [`derive`] and a fixed [`Stream`] tag.
//! Scenery values are site-keyed: the value at site `z` only depends on
//! `(scenery_seed, z)`, so sceneries can be read along any set of visited
//! sites without materializing the lattice.
//!
//! The mixing function is the SplitMix64 finalizer:
//!
//! ```text
//! z = (z ^ (z >> 30)) * 0xBF58_476D_1CE4_E5B9
//! z = (z ^ (z >> 27)) * 0x94D0_49BB_1331_11EB
//! z =  z ^ (z >> 31)
//! ```
//!
//! with wrapping multiplication, and the odd constant
//! `GOLDEN = 0x9E37_79B9_7F4A_7C15` spreads counters before mixing.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator used for every replica stream.
pub type ReplicaRng = ChaCha8Rng;

pub const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of replica `replica` under `master`:
/// `mix64(mix64(master) ^ GOLDEN * (replica + 1))`.
#[inline]
pub fn replica_seed(master: u64, replica: u64) -> u64 {
    mix64(mix64(master) ^ GOLDEN.wrapping_mul(replica.wrapping_add(1)))
}

/// Named sub-streams of a seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Walk = 1,
    Scenery = 2,
    Calibration = 3,
    CoxReference = 4,
    Primary = 5,
    Secondary = 6,
}

/// Splits an independent seed off `seed` for `stream`:
/// `mix64(seed ^ mix64(tag * GOLDEN))`.
#[inline]
pub fn derive(seed: u64, stream: Stream) -> u64 {
    mix64(seed ^ mix64((stream as u64).wrapping_mul(GOLDEN)))
}

pub fn rng_from_seed(seed: u64) -> ReplicaRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Maps the top 52 bits of `bits` to the open interval (0, 1).
#[inline]
pub fn open_unit(bits: u64) -> f64 {
    ((bits >> 12) as f64 + 0.5) * (1.0 / (1u64 << 52) as f64)
}

/// Maps the top 53 bits of `bits` to [0, 1).
#[inline]
pub fn half_open_unit(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Site-keyed uniform on (0, 1): `open_unit(mix64(mix64(seed) ^ site * GOLDEN))`.
#[inline]
pub fn site_uniform(seed: u64, site: i64) -> f64 {
    open_unit(mix64(mix64(seed) ^ (site as u64).wrapping_mul(GOLDEN)))
}
