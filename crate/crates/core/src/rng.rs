//! Keyed random streams.
//!
//! Every random draw in a run comes from a ChaCha8 stream whose seed is a hash
//! of `(run seed, purpose, coordinates...)`, e.g. `(seed, Channel, slot,
//! sector, direction, prb, draw, link)`. Draws with distinct keys are
//! independent, and a draw does not depend on how many other draws happened
//! before it, so the two policies see identical UEs, shadowing and channels.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// What a stream is used for. Part of the key.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    UePlacement = 1,
    Shadowing = 2,
    Schedule = 3,
    UeAssignment = 4,
    Channel = 5,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn mix(seed: u64, purpose: Purpose, parts: &[u64]) -> u64 {
    let mut h = splitmix64(seed ^ splitmix64(purpose as u64));
    for &p in parts {
        h = splitmix64(h ^ splitmix64(p.wrapping_add(0x632B_E59B_D9B4_E019)));
    }
    h
}

/// Opens the stream for `(seed, purpose, parts)`.
pub fn stream(seed: u64, purpose: Purpose, parts: &[u64]) -> ChaCha8Rng {
    let mut h = mix(seed, purpose, parts);
    let mut key = [0u8; 32];
    for (i, chunk) in key.chunks_exact_mut(8).enumerate() {
        h = splitmix64(h.wrapping_add(i as u64));
        chunk.copy_from_slice(&h.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// A single keyed 64-bit value; cheaper than a stream when one draw is needed.
pub fn keyed_u64(seed: u64, purpose: Purpose, parts: &[u64]) -> u64 {
    splitmix64(mix(seed, purpose, parts))
}

/// Keyed uniform index in `0..n` (`n > 0`).
pub fn keyed_index(seed: u64, purpose: Purpose, parts: &[u64], n: usize) -> usize {
    // multiply-shift keeps the bias at n / 2^64
    ((u128::from(keyed_u64(seed, purpose, parts)) * n as u128) >> 64) as usize
}

/// Keyed standard normal draw (Box-Muller on two keyed uniforms).
pub fn keyed_normal(seed: u64, purpose: Purpose, parts: &[u64]) -> f64 {
    let h = mix(seed, purpose, parts);
    let a = splitmix64(h);
    let b = splitmix64(h ^ 0xD1B5_4A32_D192_ED03);
    // 53-bit uniforms; u1 in (0, 1] so the log is finite
    let u1 = ((a >> 11) + 1) as f64 / (1u64 << 53) as f64;
    let u2 = (b >> 11) as f64 / (1u64 << 53) as f64;
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}
