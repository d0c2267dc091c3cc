use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Per-run generator; fixed seeds replay runs exactly.
pub fn solver_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed of member `index` of a restart ensemble rooted at `seed`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index + 1);
    rng.next_u64()
}
