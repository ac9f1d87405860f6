use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

/// Per-trajectory random stream: ChaCha20 keyed by the run seed, with the
/// trial index selecting the stream. Uniforms take the top 53 bits of each
/// 64-bit output so the sequence does not depend on any distribution code.
#[derive(Clone, Debug)]
pub struct TrajectoryRng {
    inner: ChaCha20Rng,
}

impl TrajectoryRng {
    pub fn for_trial(seed: u64, trial: u64) -> Self {
        let mut inner = ChaCha20Rng::seed_from_u64(seed);
        inner.set_stream(trial);
        Self { inner }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for sub-run `index` (e.g. a sweep cell) of a run seeded with `seed`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index))
}
