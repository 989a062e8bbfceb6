//! Seeded random streams.
//!
//! Every random draw in the crate comes from a stream keyed by
//! `(master seed, purpose, index)`, so results never depend on the order in
//! which replicates or grid cells are scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// What a stream is used for. Distinct purposes never share a stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Purpose {
    Points = 1,
    Thinning = 2,
    Chain = 3,
    Bootstrap = 4,
    Instance = 5,
    Initial = 6,
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive a child seed from a parent seed and an index.
pub fn derive_seed(parent: u64, index: u64) -> u64 {
    mix64(mix64(parent ^ GOLDEN).wrapping_add(index.wrapping_mul(GOLDEN)))
}

/// Independent ChaCha stream for `(master, purpose, index)`.
pub fn stream(master: u64, purpose: Purpose, index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    let words = [
        mix64(master),
        mix64(master.wrapping_add(GOLDEN)),
        mix64((purpose as u64).wrapping_mul(GOLDEN) ^ master.rotate_left(17)),
        mix64(purpose as u64 ^ 0xA076_1D64_78BD_642F),
    ];
    for (chunk, w) in key.chunks_exact_mut(8).zip(words) {
        chunk.copy_from_slice(&w.to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(index);
    rng
}

/// Convert 64 random bits into a uniform on the dyadic grid `k·2⁻⁵³ ⊂ [0,1)`.
///
/// On that grid `1 − u` is exact, which the mirrored-stream tests rely on.
#[inline]
pub fn bits_to_unit(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Counter-based uniform addressed by `(seed, a, b)`; used for per-edge coins.
#[inline]
pub fn keyed_uniform(seed: u64, a: u64, b: u64) -> f64 {
    let h = mix64(mix64(seed ^ GOLDEN).wrapping_add(a).rotate_left(29) ^ mix64(b.wrapping_add(GOLDEN)));
    bits_to_unit(h)
}

/// Source of the uniform pairs consumed by one site update.
pub trait UniformSource {
    fn pair(&mut self) -> [f64; 2];
}

/// Plain stream of uniforms.
pub struct Uniforms<R: Rng>(pub R);

impl<R: Rng> UniformSource for Uniforms<R> {
    #[inline]
    fn pair(&mut self) -> [f64; 2] {
        [bits_to_unit(self.0.next_u64()), bits_to_unit(self.0.next_u64())]
    }
}

/// The same stream with the first variate of every pair reflected, `u ↦ 1 − u`.
///
/// Feeding this to a chain with negated boundary and negated initial state
/// reproduces the original trajectory with every spin negated.
pub struct Mirrored<R: Rng>(pub R);

impl<R: Rng> UniformSource for Mirrored<R> {
    #[inline]
    fn pair(&mut self) -> [f64; 2] {
        let u1 = bits_to_unit(self.0.next_u64());
        let u2 = bits_to_unit(self.0.next_u64());
        [1.0 - u1, u2]
    }
}
