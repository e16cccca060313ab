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
    for seed in 0..3u64 {
        let stats = integer_stats(seed);
        println!("stats: {stats:?}");
        let sys = build_reduced(&stats).unwrap();
        println!("degrees {:?} bezout {}", sys.degrees(), sys.bezout_number());
        let t0 = std::time::Instant::now();
        let rep = solve_total_degree(&sys, seed, &cfg);
        println!(
            "seed {seed}: n_complex={} real={} relevant={} max={} tracked={} failed={} diverged={} sat={} time={:?}",
            rep.n_complex, rep.n_real, rep.n_relevant, rep.n_relevant_max,
            rep.paths_tracked, rep.paths_failed, rep.paths_diverged, rep.paths_on_saturant,
            t0.elapsed()
        );
        for p in &rep.points {
            println!("  root cluster={} resid={:.3e} g=({:.4}{:+.4}i, {:.4}{:+.4}i, {:.4}{:+.4}i)",
                p.cluster_size, p.residual,
                p.coords[2].re, p.coords[2].im,
                p.coords[3].re, p.coords[3].im,
                p.coords[4].re, p.coords[4].im);
        }
    }
}
