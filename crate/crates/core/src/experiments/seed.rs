//! Per-trial seed derivation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 output function; a bijection on `u64`.
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for trial `trial_index` at grid point `grid_index`.
///
/// For fixed `master_seed` and `grid_index` the map from `trial_index` is a
/// composition of bijections, so distinct trials never share a seed.
pub fn trial_seed(master_seed: u64, trial_index: u64, grid_index: u64) -> u64 {
    let stream = mix64(mix64(master_seed).wrapping_add(0x9e37_79b9_7f4a_7c15) ^ grid_index);
    mix64(stream.wrapping_add(0x632b_e59b_d9b4_e019) ^ trial_index)
}

/// Generator for one trial.
pub fn trial_rng(master_seed: u64, trial_index: u64, grid_index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(trial_seed(master_seed, trial_index, grid_index))
}
