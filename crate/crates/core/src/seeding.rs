//! Per-run random streams derived from a master seed.
//!
//! Run `k` seeds ChaCha8 with `splitmix64(master ^ splitmix64(k + GOLDEN))`.
//! Noise comes from stream 0 of that generator and solver randomness from
//! stream 1, so each run's draws depend only on `(master, k)` and adding runs
//! never perturbs earlier ones.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for run `run` under `master`.
pub fn derive_seed(master: u64, run: u64) -> u64 {
    splitmix64(master ^ splitmix64(run.wrapping_add(GOLDEN)))
}

/// `(noise, solver)` generators for one run.
pub fn run_streams(master: u64, run: u64) -> (ChaCha8Rng, ChaCha8Rng) {
    let seed = derive_seed(master, run);
    let noise = ChaCha8Rng::seed_from_u64(seed);
    let mut solver = ChaCha8Rng::seed_from_u64(seed);
    solver.set_stream(1);
    (noise, solver)
}
