//! Seeded random streams.
//!
//! Every estimator splits its sample budget into fixed-size blocks. Block `i`
//! draws from ChaCha stream `i` of the generator seeded with the estimator's
//! seed, so results never depend on how blocks are scheduled across workers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Number of samples drawn from one stream before moving to the next.
pub const BLOCK_SIZE: u64 = 256;

/// The generator for `(seed, stream_id)`.
pub fn stream(seed: u64, stream_id: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id);
    rng
}

/// Derive a child seed from a master seed and a tag (splitmix64 finalizer).
pub fn derive_seed(master: u64, tag: u64) -> u64 {
    let mut z = master ^ tag.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Split `samples` into `(stream_id, block_len)` pairs.
pub fn blocks(samples: u64) -> impl Iterator<Item = (u64, u64)> + Clone {
    let full = samples / BLOCK_SIZE;
    let rest = samples % BLOCK_SIZE;
    (0..full)
        .map(|i| (i, BLOCK_SIZE))
        .chain((rest > 0).then_some((full, rest)))
}

/// How a row of a sweep gets its seed from the master seed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SeedMode {
    /// `derive_seed(master, tag)`, distinct per row.
    #[default]
    Derived,
    /// The master seed itself, to rerun one row in isolation.
    Direct,
}

impl SeedMode {
    pub fn seed(self, master: u64, tag: u64) -> u64 {
        match self {
            SeedMode::Derived => derive_seed(master, tag),
            SeedMode::Direct => master,
        }
    }
}
