//! Deterministic random streams.
//!
//! Every random quantity is drawn from a ChaCha8 stream whose key is derived
//! from a 64-bit seed and whose stream id names the consumer (channel link,
//! mismatch link, initialization, symbol oracle). Draws therefore depend only
//! on `(seed, purpose, index)` and never on execution order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{C64, CMat};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Channel = 1,
    Mismatch = 2,
    Init = 3,
    Symbols = 4,
    Validation = 5,
}

/// SplitMix64 finalizer applied to `seed ⊕ golden·(index+1)`. Used to derive
/// per-trial seeds from a master seed.
pub fn mix_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn stream(seed: u64, purpose: Purpose, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((purpose as u64) << 48) | (index & 0xFFFF_FFFF_FFFF));
    rng
}

/// One circularly-symmetric complex Gaussian draw with total variance
/// `variance` (`variance / 2` per real component).
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> C64 {
    let s = (0.5 * variance).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(s * re, s * im)
}

/// A `rows × cols` matrix of i.i.d. `CN(0, variance)` entries, filled in
/// column-major order.
pub fn complex_gaussian_matrix<R: Rng + ?Sized>(
    rng: &mut R,
    rows: usize,
    cols: usize,
    variance: f64,
) -> CMat {
    CMat::from_fn(rows, cols, |_, _| complex_gaussian(rng, variance))
}
