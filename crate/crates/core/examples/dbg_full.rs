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
    for seed in [0u64, 1] {
        let stats = integer_stats(seed);
        println!("seed {seed} stats: {stats:?}");
        let vy = (stats.my11 - stats.my1*stats.my1) * (stats.my22 - stats.my2*stats.my2)
            - (stats.my12 - stats.my1*stats.my2).powi(2);
        println!("  y-block covariance det: {vy}");
        let red = build_reduced(&stats).unwrap();
        let full = build_full(&stats);
        for (name, sys) in [("reduced", &red), ("full", &full)] {
            for s2 in [11u64, 222] {
                let t0 = std::time::Instant::now();
                let rep = solve_total_degree(sys, s2, &cfg);
                println!("  {name} solve(seed {s2}): n_complex={} failed={} diverged={} sat={} t={:?}",
                    rep.n_complex, rep.paths_failed, rep.paths_diverged, rep.paths_on_saturant, t0.elapsed());
                let mut roots: Vec<String> = rep.points.iter().map(|p| format!(
                    "    ({:.5}{:+.5}i,{:.5}{:+.5}i,{:.5}{:+.5}i) resid {:.2e}",
                    p.coords[2].re, p.coords[2].im, p.coords[3].re, p.coords[3].im,
                    p.coords[4].re, p.coords[4].im, p.residual)).collect();
                roots.sort();
                println!("{}", roots.join("\n"));
            }
        }
    }
}
