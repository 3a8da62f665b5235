//! Deterministic parallel Monte Carlo driver.
//!
//! Trials are grouped into fixed-size blocks. Block `b` of stream `s` draws from its own
//! ChaCha8 generator keyed by `(master_seed, s, b)`, blocks run in parallel, and partial
//! results are merged in block order. Results therefore depend only on the master seed and
//! the trial count, never on the number of worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Trials per block.
pub const BLOCK_SIZE: u64 = 4096;

/// Generator for block `block` of logical stream `stream` under `master_seed`.
pub fn block_rng(master_seed: u64, stream: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ block);
    rng
}

/// Runs `trials` trials split into blocks; `body(rng, n, acc)` performs `n` trials into `acc`.
pub fn run_blocks<A, I, F, M>(
    master_seed: u64,
    stream: u64,
    trials: u64,
    init: I,
    body: F,
    merge: M,
) -> A
where
    A: Send,
    I: Fn() -> A + Sync,
    F: Fn(&mut ChaCha8Rng, u64, &mut A) + Sync,
    M: Fn(A, A) -> A,
{
    let blocks = trials.div_ceil(BLOCK_SIZE);
    let parts: Vec<A> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let n = BLOCK_SIZE.min(trials - b * BLOCK_SIZE);
            let mut rng = block_rng(master_seed, stream, b);
            let mut acc = init();
            body(&mut rng, n, &mut acc);
            acc
        })
        .collect();
    parts.into_iter().fold(init(), merge)
}
