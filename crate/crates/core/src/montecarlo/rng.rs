//! Counter-based random substreams.
//!
//! Every random draw in the crate comes from ChaCha8 keyed by
//! `(seed, domain)` with the ChaCha stream id set to the item index
//! (sample, row, replicate). Item `i` therefore sees the same numbers
//! whether items are generated serially or on any number of threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Separates the streams used by different procedures under one seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Domain {
    QuadForm = 1,
    Observations = 2,
    ChiSquare = 3,
    Calibration = 4,
    Replicate = 5,
}

fn mix(mut z: u64) -> u64 {
    // splitmix64 finalizer
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Generator for item `index` of `domain` under `seed`.
pub fn substream(seed: u64, domain: Domain, index: u64) -> ChaCha8Rng {
    let key = mix(seed ^ mix(domain as u64));
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    rng.set_stream(index);
    rng
}
