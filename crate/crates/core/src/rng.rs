//! Seeded random streams.
//!
//! Every random draw in the crate goes through ChaCha20 (`rand_chacha`),
//! seeded with `seed_from_u64(seed)`. Monte-Carlo trials use the same
//! generator with the stream id set to the trial index, so trial `k` of a
//! run with master seed `s` sees the same numbers regardless of scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::Vector;

/// Name of the generator recorded in reports.
pub const GENERATOR: &str = "ChaCha20 (rand_chacha 0.9, seed_from_u64, stream = trial index)";

pub fn seeded(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Stream `stream` of the generator seeded by `master_seed`.
pub fn stream(master_seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    rng
}

pub fn gaussian_vector<R: rand::Rng + ?Sized>(rng: &mut R, len: usize, scale: f64) -> Vector {
    Vector::from_iterator(
        len,
        (0..len).map(|_| {
            let g: f64 = StandardNormal.sample(rng);
            g * scale
        }),
    )
}
