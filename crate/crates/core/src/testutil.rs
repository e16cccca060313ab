//! Shared generators for unit tests.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::model::{reduce, Dataset, SuffStats};

/// Random integer-valued statistics with a positive definite complete-case
/// covariance block, so they are realizable by an actual dataset.
pub(crate) fn integer_stats(seed: u64) -> SuffStats<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(77);
    let my1 = rng.random_range(-3..=3) as f64;
    let my2 = rng.random_range(-3..=3) as f64;
    let mz1 = rng.random_range(-3..=3) as f64;
    let mw1 = rng.random_range(-3..=3) as f64;
    SuffStats {
        n: rng.random_range(10..=100) as f64,
        r: rng.random_range(10..=100) as f64,
        s: rng.random_range(10..=100) as f64,
        my1,
        my2,
        my11: my1 * my1 + rng.random_range(2..=6) as f64,
        my12: my1 * my2 + rng.random_range(-1..=1) as f64,
        my22: my2 * my2 + rng.random_range(2..=6) as f64,
        mz1,
        mz2: mz1 * mz1 + rng.random_range(1..=5) as f64,
        mw1,
        mw2: mw1 * mw1 + rng.random_range(1..=5) as f64,
    }
}

/// A correlated Gaussian dataset censored by a missing-at-random rule
/// (second coordinate dropped whenever the first is small, plus a random
/// sprinkle), reduced to statistics.
pub(crate) fn mar_stats(seed: u64, samples: usize) -> SuffStats<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(991);
    let mut y = Vec::new();
    let mut z = Vec::new();
    let mut w = Vec::new();
    // Fixed moderately correlated base distribution.
    let (s11, s12, s22) = (1.0f64, 0.6, 1.4);
    let l11 = s11.sqrt();
    let l21 = s12 / l11;
    let l22 = (s22 - s12 * s12 / s11).sqrt();
    for _ in 0..samples {
        let u1: f64 = 1.0 - rng.random::<f64>();
        let u2: f64 = rng.random();
        let g0 = (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos();
        let g1 = (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).sin();
        let x1 = 0.3 + l11 * g0;
        let x2 = -0.2 + l21 * g0 + l22 * g1;
        let coin: f64 = rng.random();
        if x1 < -0.8 {
            z.push(x1);
        } else if coin < 0.15 {
            z.push(x1);
        } else if coin < 0.3 {
            w.push(x2);
        } else {
            y.push([x1, x2]);
        }
    }
    reduce(&Dataset::new(y, z, w).unwrap())
}
