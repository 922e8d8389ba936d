//! Deterministic per-trial randomness.
//!
//! Trial `i` under master seed `s` uses ChaCha8 keyed by
//! `ChaCha8Rng::seed_from_u64(s)` on stream `i`. Trials are therefore
//! independent of evaluation order, and any implementation of ChaCha8 with the
//! same seed expansion reproduces them.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Uniform integer in `[0, n)` by rejection sampling (no modulo bias).
pub fn uniform_below(rng: &mut impl RngCore, n: u64) -> u64 {
    assert!(n > 0, "empty range");
    let zone = u64::MAX - (u64::MAX % n);
    loop {
        let x = rng.next_u64();
        if x < zone {
            return x % n;
        }
    }
}

/// A fair bit.
pub fn coin(rng: &mut impl RngCore) -> bool {
    rng.next_u64() >> 63 == 1
}
