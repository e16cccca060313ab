use missdeg::critical::build_reduced;
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
    // The y-block covariance stays positive definite so the statistics are
    // realizable by an actual dataset (|c| <= 1 < v1*v2).
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
    let t0 = std::time::Instant::now();
    let mut bad = 0;
    let mut max_resid = 0.0f64;
    let mut warned = 0;
    for seed in 0..100u64 {
        let stats = integer_stats(seed);
        let sys = build_reduced(&stats).unwrap();
        let rep = solve_total_degree(&sys, seed, &cfg);
        if rep.n_complex != 9 {
            bad += 1;
            println!("seed {seed}: n_complex={} failed={} div={} sat={} tracked={}",
                rep.n_complex, rep.paths_failed, rep.paths_diverged, rep.paths_on_saturant, rep.paths_tracked);
        }
        if rep.solver_warning { warned += 1; }
        for p in &rep.points {
            max_resid = max_resid.max(p.residual);
            assert!(rep.n_relevant_max >= 1 || rep.n_complex != 9);
        }
    }
    println!("100 solves in {:?}; deficient={bad} warned={warned} max_resid={max_resid:.3e}", t0.elapsed());
}
