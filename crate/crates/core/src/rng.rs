//! Seeded randomness.
//!
//! Every sample draws from its own `ChaCha8Rng`, seeded by folding a list of
//! integer tags (suite index, sample index, ...) into the base seed with
//! SplitMix64. The derivation is pure integer arithmetic, so streams are
//! identical across platforms and independent of scheduling order.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type LabRng = ChaCha8Rng;

pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(base: u64, tags: &[u64]) -> u64 {
    tags.iter().fold(splitmix64(base), |acc, &t| splitmix64(acc ^ splitmix64(t)))
}

pub fn rng_for(base: u64, tags: &[u64]) -> LabRng {
    ChaCha8Rng::seed_from_u64(derive_seed(base, tags))
}

/// Stable 64-bit tag for a string (FNV-1a).
pub fn tag(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

pub fn normal(rng: &mut LabRng) -> f64 {
    rng.sample(StandardNormal)
}

/// Complex standard normal: E|z|^2 = 1.
pub fn cnormal(rng: &mut LabRng) -> Complex64 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Complex64::new(s * normal(rng), s * normal(rng))
}
