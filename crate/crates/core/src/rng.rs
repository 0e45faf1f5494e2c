//! Deterministic seeding and uniform deviates.
//!
//! Randomized routines never share a generator across items: each sample,
//! cell or probe derives its own ChaCha stream from `(base seed, salt)`.
//! Results are therefore identical no matter how work is scheduled.

// Carries f64 math in no_std builds; redundant once std is in the crate graph.
#[allow(unused_imports)]
use num_traits::Float;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::C64;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive an independent stream seed from a base seed and an item index.
pub fn derive_seed(base: u64, salt: u64) -> u64 {
    let mut s = base ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    let a = splitmix64(&mut s);
    splitmix64(&mut s) ^ a.rotate_left(23)
}

/// Fresh generator for item `salt` under `base`.
pub fn stream(base: u64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(base, salt))
}

/// Uniform in `[0, 1)` with 53 random bits.
pub fn unit_f64(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

pub fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * unit_f64(rng)
}

/// Uniform angle in `[0, 2*pi)`.
pub fn phase(rng: &mut ChaCha8Rng) -> f64 {
    core::f64::consts::TAU * unit_f64(rng)
}

/// Standard normal via Box-Muller.
pub fn normal(rng: &mut ChaCha8Rng) -> f64 {
    // unit_f64 can return 0; shift into (0, 1] so the log is finite.
    let u = 1.0 - unit_f64(rng);
    let v = phase(rng);
    (-2.0 * u.ln()).sqrt() * v.cos()
}

/// Point of the unit circle.
pub fn unit_complex(rng: &mut ChaCha8Rng) -> C64 {
    C64::from_polar(1.0, phase(rng))
}

/// Complex Gaussian; isotropic, so normalized vectors of these are uniform
/// on the sphere.
pub fn normal_complex(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(normal(rng), normal(rng))
}
