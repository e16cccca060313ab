use missdeg::critical::{build_full, build_reduced};
use missdeg::homotopy::{solve_total_degree, SolverConfig};
use missdeg::model::SuffStats;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

fn integer_stats(seed: u64) -> SuffStats<f64> {
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
        my1, my2,
        my11: my1 * my1 + rng.random_range(2..=6) as f64,
        my12: my1 * my2 + rng.random_range(-1..=1) as f64,
        my22: my2 * my2 + rng.random_range(2..=6) as f64,
        mz1, mz2: mz1 * mz1 + rng.random_range(1..=5) as f64,
        mw1, mw2: mw1 * mw1 + rng.random_range(1..=5) as f64,
    }
}

fn main() {
    let cfg = SolverConfig::default();
    let stats = integer_stats(97);
    println!("stats {stats:?}");
    let red = build_reduced(&stats).unwrap();
    let full = build_full(&stats);
    for s2 in [97u64, 1, 2, 3] {
        let rep = solve_total_degree(&red, s2, &cfg);
        println!("reduced seed {s2}: n={} fail={} div={} sat={} tracked={}",
            rep.n_complex, rep.paths_failed, rep.paths_diverged, rep.paths_on_saturant, rep.paths_tracked);
    }
    let rep = solve_total_degree(&full, 1, &cfg);
    println!("full seed 1: n={} fail={} div={} sat={} tracked={}",
        rep.n_complex, rep.paths_failed, rep.paths_diverged, rep.paths_on_saturant, rep.paths_tracked);
    for p in &rep.points {
        println!("  ({:.5}{:+.5}i, {:.5}{:+.5}i, {:.5}{:+.5}i) resid {:.1e} real={} rel={}",
            p.coords[2].re, p.coords[2].im, p.coords[3].re, p.coords[3].im,
            p.coords[4].re, p.coords[4].im, p.residual, p.is_real, p.is_relevant);
    }
    // A slightly perturbed version of the same statistics.
    let mut pert = stats;
    pert.my12 += 0.01;
    let red2 = build_reduced(&pert).unwrap();
    let rep2 = solve_total_degree(&red2, 1, &cfg);
    println!("perturbed reduced: n={}", rep2.n_complex);
}
