//! Pinned random streams and draw primitives. Every draw is built from
//! `next_u64` of a ChaCha8 stream so trajectories do not depend on the
//! sampling algorithms of any particular `rand` release.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cube::BitState;

pub type StreamRng = ChaCha8Rng;

/// Stream for replica `replica` of a run seeded with `seed`.
pub fn stream(seed: u64, replica: u64) -> StreamRng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add(replica))
}

/// Uniform integer in `[0, bound)` by widening multiply with rejection.
pub fn draw_below<R: RngCore + ?Sized>(rng: &mut R, bound: u64) -> u64 {
    assert!(bound > 0);
    let threshold = bound.wrapping_neg() % bound;
    loop {
        let wide = u128::from(rng.next_u64()) * u128::from(bound);
        if (wide as u64) >= threshold {
            return (wide >> 64) as u64;
        }
    }
}

/// Fair bit from the top bit of one word.
pub fn draw_bit<R: RngCore + ?Sized>(rng: &mut R) -> bool {
    rng.next_u64() >> 63 == 1
}

/// Uniform real in `[0, 1)` with 53 bits of precision.
pub fn draw_unit<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform state of `{0,1}^n`, filled one word per 64 coordinates.
pub fn draw_state<R: RngCore + ?Sized>(rng: &mut R, n: usize) -> BitState {
    let mut x = BitState::zeros(n);
    let mut i = 0;
    while i < n {
        let w = rng.next_u64();
        for b in 0..64.min(n - i) {
            if w >> b & 1 == 1 {
                x.set(i + b, true);
            }
        }
        i += 64;
    }
    x
}
