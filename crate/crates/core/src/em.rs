//! EM iterations for both models.
//!
//! The Gaussian fit imputes the censored coordinate's first and second
//! moments from the conditional normal distribution given the observed one,
//! then moment-matches; it needs only the sufficient statistics, never the
//! raw data. The multinomial fit allocates the supplementary margin counts
//! proportionally across their rows and columns and renormalizes.
//!
//! Both fits record their full iterate trace so ascent can be audited, and
//! both stop on a gradient criterion: score norm for the Gaussian model,
//! simplex KKT residual for the multinomial one.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::likelihood::{loglik, score};
use crate::model::{CountTable, GaussianParams, ProbTable, SuffStats};
use crate::scalar::Real;

/// Iterate history of an EM run: parameters and objective value per
/// iteration (the initial point included), convergence flag, and the number
/// of update steps taken.
#[derive(Debug, Clone, Serialize)]
pub struct EmTrace<P, T> {
    pub iterates: Vec<(P, T)>,
    pub converged: bool,
    pub iterations: usize,
}

impl<P, T: Real> EmTrace<P, T> {
    pub fn final_params(&self) -> &P {
        &self.iterates.last().expect("trace never empty").0
    }

    pub fn final_loglik(&self) -> T {
        self.iterates.last().expect("trace never empty").1
    }

    /// Ascent audit: no step may decrease the objective by more than `slack`.
    pub fn is_monotone(&self, slack: T) -> bool {
        self.iterates.windows(2).all(|w| w[1].1 >= w[0].1 - slack)
    }
}

impl<T: Real> EmTrace<GaussianParams<T>, T> {
    /// CSV dump: iteration, loglik, then the parameter columns.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iteration,loglik,mu1,mu2,g11,g12,g22\n");
        for (i, (p, ll)) in self.iterates.iter().enumerate() {
            out.push_str(&format!(
                "{i},{ll},{},{},{},{},{}\n",
                p.mu1, p.mu2, p.g11, p.g12, p.g22
            ));
        }
        out
    }
}

impl<T: Real> EmTrace<ProbTable<T>, T> {
    pub fn to_csv(&self) -> String {
        let (m, n) = {
            let p = self.final_params();
            (p.nrows(), p.ncols())
        };
        let mut out = String::from("iteration,loglik");
        for i in 0..m {
            for j in 0..n {
                out.push_str(&format!(",p_{i}_{j}"));
            }
        }
        out.push('\n');
        for (it, (p, ll)) in self.iterates.iter().enumerate() {
            out.push_str(&format!("{it},{ll}"));
            for row in &p.p {
                for v in row {
                    out.push_str(&format!(",{v}"));
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Deterministic default start: means from the per-coordinate available
/// data, diagonal covariance from the available variances.
pub fn default_gaussian_init<T: Real>(st: &SuffStats<T>) -> GaussianParams<T> {
    let zero = T::zero();
    let (mut sum1, mut cnt1) = (zero, zero);
    let (mut sum2, mut cnt2) = (zero, zero);
    let (mut sq1, mut sq2) = (zero, zero);
    if st.n > zero {
        sum1 = sum1 + st.n * st.my1;
        sq1 = sq1 + st.n * st.my11;
        cnt1 = cnt1 + st.n;
        sum2 = sum2 + st.n * st.my2;
        sq2 = sq2 + st.n * st.my22;
        cnt2 = cnt2 + st.n;
    }
    if st.r > zero {
        sum1 = sum1 + st.r * st.mz1;
        sq1 = sq1 + st.r * st.mz2;
        cnt1 = cnt1 + st.r;
    }
    if st.s > zero {
        sum2 = sum2 + st.s * st.mw1;
        sq2 = sq2 + st.s * st.mw2;
        cnt2 = cnt2 + st.s;
    }
    let floor = T::of(1e-6);
    let mu1 = if cnt1 > zero { sum1 / cnt1 } else { zero };
    let mu2 = if cnt2 > zero { sum2 / cnt2 } else { zero };
    let v1 = if cnt1 > zero { (sq1 / cnt1 - mu1 * mu1).max(floor) } else { T::one() };
    let v2 = if cnt2 > zero { (sq2 / cnt2 - mu2 * mu2).max(floor) } else { T::one() };
    GaussianParams::new(mu1, mu2, T::one() / v1, zero, T::one() / v2)
}

/// EM for the bivariate normal missing-data model in terms of sufficient
/// statistics. Stops when both the parameter change and the score norm
/// (scaled by the sample size) fall below `em_tol`.
pub fn em_gaussian<T: Real>(
    stats: &SuffStats<T>,
    init: &GaussianParams<T>,
    em_tol: T,
    max_iter: usize,
) -> Result<EmTrace<GaussianParams<T>, T>> {
    if !init.is_relevant() {
        return Err(Error::invalid("EM initializer must have positive definite Γ"));
    }
    stats.validate()?;
    let total = stats.total();
    let zero = T::zero();
    let mut params = *init;
    let mut iterates = vec![(params, loglik(stats, &params)?)];
    let mut converged = false;
    let mut iterations = 0;

    for _ in 0..max_iter {
        let (s11, s12, s22) = params.sigma()?;

        // E-step: expected completed-data sums.
        let mut t1 = zero;
        let mut t2 = zero;
        let mut t11 = zero;
        let mut t12 = zero;
        let mut t22 = zero;
        if stats.n > zero {
            t1 = t1 + stats.n * stats.my1;
            t2 = t2 + stats.n * stats.my2;
            t11 = t11 + stats.n * stats.my11;
            t12 = t12 + stats.n * stats.my12;
            t22 = t22 + stats.n * stats.my22;
        }
        if stats.r > zero {
            // X2 conditioned on X1 = z.
            let b = s12 / s11;
            let a = params.mu2 - b * params.mu1;
            let cvar = s22 - s12 * s12 / s11;
            t1 = t1 + stats.r * stats.mz1;
            t11 = t11 + stats.r * stats.mz2;
            t2 = t2 + stats.r * (a + b * stats.mz1);
            t12 = t12 + stats.r * (a * stats.mz1 + b * stats.mz2);
            t22 = t22
                + stats.r
                    * (a * a + T::of(2.0) * a * b * stats.mz1 + b * b * stats.mz2 + cvar);
        }
        if stats.s > zero {
            // X1 conditioned on X2 = w.
            let b = s12 / s22;
            let a = params.mu1 - b * params.mu2;
            let cvar = s11 - s12 * s12 / s22;
            t2 = t2 + stats.s * stats.mw1;
            t22 = t22 + stats.s * stats.mw2;
            t1 = t1 + stats.s * (a + b * stats.mw1);
            t12 = t12 + stats.s * (a * stats.mw1 + b * stats.mw2);
            t11 = t11
                + stats.s
                    * (a * a + T::of(2.0) * a * b * stats.mw1 + b * b * stats.mw2 + cvar);
        }

        // M-step: completed-data moments.
        let mu1 = t1 / total;
        let mu2 = t2 / total;
        let c11 = t11 / total - mu1 * mu1;
        let c12 = t12 / total - mu1 * mu2;
        let c22 = t22 / total - mu2 * mu2;
        if !(c11 > zero && c11 * c22 - c12 * c12 > zero) {
            return Err(Error::degenerate("EM update left the positive definite cone"));
        }
        let next = GaussianParams::from_sigma(mu1, mu2, c11, c12, c22)?;

        let delta = [
            next.mu1 - params.mu1,
            next.mu2 - params.mu2,
            next.g11 - params.g11,
            next.g12 - params.g12,
            next.g22 - params.g22,
        ]
        .iter()
        .map(|d| d.abs())
        .fold(zero, T::max);

        params = next;
        iterations += 1;
        iterates.push((params, loglik(stats, &params)?));

        let score_norm = score(stats, &params)?.norm();
        let deep = score_norm <= em_tol * total * T::of(1e-3);
        if deep || (delta <= em_tol && score_norm <= em_tol * total) {
            converged = true;
            break;
        }
    }
    Ok(EmTrace { iterates, converged, iterations })
}

/// Multinomial observed-data log-likelihood (zero counts contribute
/// nothing).
pub fn multinomial_loglik<T: Real>(table: &CountTable<T>, p: &ProbTable<T>) -> T {
    let zero = T::zero();
    let mut ll = zero;
    for (i, row) in table.t.iter().enumerate() {
        for (j, &t) in row.iter().enumerate() {
            if t > zero {
                ll = ll + t * p.p[i][j].ln();
            }
        }
    }
    for (i, &r) in table.rvec.iter().enumerate() {
        if r > zero {
            ll = ll + r * p.row_margin(i).ln();
        }
    }
    for (j, &s) in table.svec.iter().enumerate() {
        if s > zero {
            ll = ll + s * p.col_margin(j).ln();
        }
    }
    ll
}

/// Boundary-aware KKT residual of the simplex-constrained maximization: at an
/// interior maximum every weighted gradient component equals the grand total.
fn kkt_residual<T: Real>(table: &CountTable<T>, p: &ProbTable<T>, total: T) -> T {
    let tiny = T::of(1e-300);
    let mut worst = T::zero();
    for i in 0..table.nrows() {
        for j in 0..table.ncols() {
            let pij = p.p[i][j];
            let mut g = T::zero();
            if table.t[i][j] > T::zero() {
                g = g + table.t[i][j] / pij.max(tiny);
            }
            if table.rvec[i] > T::zero() {
                g = g + table.rvec[i] / p.row_margin(i).max(tiny);
            }
            if table.svec[j] > T::zero() {
                g = g + table.svec[j] / p.col_margin(j).max(tiny);
            }
            let viol = if pij > T::of(1e-12) { (g - total).abs() } else { (g - total).max(T::zero()) };
            worst = worst.max(viol);
        }
    }
    worst / (T::one() + total)
}

/// EM for the multinomial missing-data model: proportional allocation of the
/// margins, then renormalization. Stops on the KKT residual.
pub fn em_multinomial<T: Real>(
    table: &CountTable<T>,
    init: &ProbTable<T>,
    em_tol: T,
    max_iter: usize,
) -> Result<EmTrace<ProbTable<T>, T>> {
    table.validate()?;
    let (m, n) = (table.nrows(), table.ncols());
    if init.nrows() != m || init.ncols() != n {
        return Err(Error::invalid("initializer shape does not match the table"));
    }
    if !init.p.iter().flatten().all(|v| *v > T::zero()) || !init.on_simplex(T::of(1e-9)) {
        return Err(Error::invalid("initializer must be strictly positive on the simplex"));
    }
    let total = table.total();
    if !(total > T::zero()) {
        return Err(Error::invalid("table has no observations"));
    }
    let margin_floor = T::of(1e-14);

    let mut p = init.clone();
    let mut iterates = vec![(p.clone(), multinomial_loglik(table, &p))];
    let mut converged = false;
    let mut iterations = 0;

    for _ in 0..max_iter {
        let mut next = vec![vec![T::zero(); n]; m];
        for i in 0..m {
            let pi = p.row_margin(i);
            if table.rvec[i] > T::zero() && pi < margin_floor {
                return Err(Error::degenerate(format!(
                    "row margin {i} underflowed with positive supplementary count"
                )));
            }
            for j in 0..n {
                let pj = p.col_margin(j);
                if table.svec[j] > T::zero() && pj < margin_floor {
                    return Err(Error::degenerate(format!(
                        "column margin {j} underflowed with positive supplementary count"
                    )));
                }
                let mut t = table.t[i][j];
                if table.rvec[i] > T::zero() {
                    t = t + table.rvec[i] * p.p[i][j] / pi;
                }
                if table.svec[j] > T::zero() {
                    t = t + table.svec[j] * p.p[i][j] / pj;
                }
                next[i][j] = t / total;
            }
        }
        p = ProbTable { p: next };
        iterations += 1;
        iterates.push((p.clone(), multinomial_loglik(table, &p)));

        if kkt_residual(table, &p, total) < em_tol {
            converged = true;
            break;
        }
    }
    Ok(EmTrace { iterates, converged, iterations })
}
