//! Observed-data log-likelihood of the bivariate normal missing-data model
//! in the concentration chart `(μ1, μ2, γ11, γ12, γ22)`, together with its
//! gradient (the score) and Hessian.
//!
//! The likelihood is the five-term expression obtained after dropping the
//! `-(2n+r+s)/2·log 2π` constant: a `(n+r+s)/2·log det Γ` term, the two
//! marginal log corrections `-r/2·log γ22` and `-s/2·log γ11`, and the three
//! quadratic block terms. Terms belonging to an empty block are dropped
//! exactly rather than multiplied by zero, so boundary cases like `n = 0`
//! stay well defined.

use crate::error::{Error, Result};
use crate::model::{GaussianParams, SuffStats};
use crate::scalar::Real;

/// Gradient of the log-likelihood in the order
/// `(μ1, μ2, γ11, γ12, γ22)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreVector<T> {
    pub d_mu1: T,
    pub d_mu2: T,
    pub d_g11: T,
    pub d_g12: T,
    pub d_g22: T,
}

impl<T: Real> ScoreVector<T> {
    pub fn as_array(&self) -> [T; 5] {
        [self.d_mu1, self.d_mu2, self.d_g11, self.d_g12, self.d_g22]
    }

    pub fn norm(&self) -> T {
        self.as_array().iter().map(|v| *v * *v).sum::<T>().sqrt()
    }
}

/// Centered quadratic moments of the three blocks at the given mean.
struct BlockQuadratics<T> {
    q11: T,
    q12: T,
    q22: T,
    qz: T,
    qw: T,
}

fn quadratics<T: Real>(st: &SuffStats<T>, p: &GaussianParams<T>) -> BlockQuadratics<T> {
    let two = T::of(2.0);
    BlockQuadratics {
        q11: st.my11 - two * p.mu1 * st.my1 + p.mu1 * p.mu1,
        q12: st.my12 - (st.my1 * p.mu2 + st.my2 * p.mu1) + p.mu1 * p.mu2,
        q22: st.my22 - two * p.mu2 * st.my2 + p.mu2 * p.mu2,
        qz: st.mz2 - two * p.mu1 * st.mz1 + p.mu1 * p.mu1,
        qw: st.mw2 - two * p.mu2 * st.mw1 + p.mu2 * p.mu2,
    }
}

fn require_chart<T: Real>(p: &GaussianParams<T>) -> Result<T> {
    let det = p.det_gamma();
    if p.g11 > T::zero() && p.g22 > T::zero() && det > T::zero() {
        Ok(det)
    } else {
        Err(Error::invalid(
            "parameters outside the evaluation chart (need γ11 > 0, γ22 > 0, det Γ > 0)",
        ))
    }
}

/// Observed-data log-likelihood, constants dropped.
pub fn loglik<T: Real>(st: &SuffStats<T>, p: &GaussianParams<T>) -> Result<T> {
    let det = require_chart(p)?;
    let half = T::of(0.5);
    let q = quadratics(st, p);

    let mut out = half * st.total() * det.ln();
    if st.n > T::zero() {
        out = out
            - half * st.n * (q.q11 * p.g11 + T::of(2.0) * q.q12 * p.g12 + q.q22 * p.g22);
    }
    if st.r > T::zero() {
        out = out - half * st.r * p.g22.ln() - half * st.r * (det / p.g22) * q.qz;
    }
    if st.s > T::zero() {
        out = out - half * st.s * p.g11.ln() - half * st.s * (det / p.g11) * q.qw;
    }
    Ok(out)
}

/// Score (gradient of [`loglik`]) at a chart point.
pub fn score<T: Real>(st: &SuffStats<T>, p: &GaussianParams<T>) -> Result<ScoreVector<T>> {
    let det = require_chart(p)?;
    Ok(score_unchecked(st, p, det))
}

/// Score without the chart-positivity check: the expression is rational and
/// stays finite whenever `γ11`, `γ22`, and `det Γ` are nonzero, which is what
/// critical-point classification off the positive cone needs.
pub fn score_unchecked<T: Real>(st: &SuffStats<T>, p: &GaussianParams<T>, det: T) -> ScoreVector<T> {
    let half = T::of(0.5);
    let total = st.total();
    let q = quadratics(st, p);

    let mut d_mu1 = T::zero();
    let mut d_mu2 = T::zero();
    let mut d_g11 = half * total * p.g22 / det;
    let mut d_g22 = half * total * p.g11 / det;
    let mut d_g12 = -total * p.g12 / det;

    if st.n > T::zero() {
        d_mu1 = d_mu1 + st.n * ((st.my1 - p.mu1) * p.g11 + (st.my2 - p.mu2) * p.g12);
        d_mu2 = d_mu2 + st.n * ((st.my2 - p.mu2) * p.g22 + (st.my1 - p.mu1) * p.g12);
        d_g11 = d_g11 - half * st.n * q.q11;
        d_g22 = d_g22 - half * st.n * q.q22;
        d_g12 = d_g12 - st.n * q.q12;
    }
    if st.r > T::zero() {
        d_mu1 = d_mu1 + st.r * (det / p.g22) * (st.mz1 - p.mu1);
        d_g11 = d_g11 - half * st.r * q.qz;
        d_g22 = d_g22
            - half * st.r / p.g22
            - half * st.r * (p.g12 * p.g12) / (p.g22 * p.g22) * q.qz;
        d_g12 = d_g12 + st.r * p.g12 / p.g22 * q.qz;
    }
    if st.s > T::zero() {
        d_mu2 = d_mu2 + st.s * (det / p.g11) * (st.mw1 - p.mu2);
        d_g11 = d_g11
            - half * st.s / p.g11
            - half * st.s * (p.g12 * p.g12) / (p.g11 * p.g11) * q.qw;
        d_g22 = d_g22 - half * st.s * q.qw;
        d_g12 = d_g12 + st.s * p.g12 / p.g11 * q.qw;
    }

    ScoreVector { d_mu1, d_mu2, d_g11, d_g12, d_g22 }
}

/// Hessian of [`loglik`] as a symmetric 5×5 matrix in the order
/// `(μ1, μ2, γ11, γ12, γ22)`, stored row-major.
pub fn hessian<T: Real>(st: &SuffStats<T>, p: &GaussianParams<T>) -> Result<[[T; 5]; 5]> {
    require_chart(p)?;
    Ok(hessian_unchecked(st, p))
}

/// Hessian via the rational second-derivative formulas; defined whenever
/// `γ11`, `γ22`, and `det Γ` are nonzero.
pub fn hessian_unchecked<T: Real>(st: &SuffStats<T>, p: &GaussianParams<T>) -> [[T; 5]; 5] {
    let half = T::of(0.5);
    let two = T::of(2.0);
    let det = p.det_gamma();
    let det2 = det * det;
    let total = st.total();
    let q = quadratics(st, p);
    let (n, r, s) = (st.n, st.r, st.s);
    let (g11, g12, g22) = (p.g11, p.g12, p.g22);

    // Index map: 0 = μ1, 1 = μ2, 2 = γ11, 3 = γ12, 4 = γ22.
    let mut h = [[T::zero(); 5]; 5];

    // Concentration-only part (always present through the log det term).
    h[2][2] = -half * total * g22 * g22 / det2;
    h[4][4] = -half * total * g11 * g11 / det2;
    h[2][4] = -half * total * g12 * g12 / det2;
    h[2][3] = total * g22 * g12 / det2;
    h[3][4] = total * g11 * g12 / det2;
    h[3][3] = -total * (det + two * g12 * g12) / det2;

    if n > T::zero() {
        h[0][0] = h[0][0] - n * g11;
        h[0][1] = h[0][1] - n * g12;
        h[1][1] = h[1][1] - n * g22;
        h[0][2] = h[0][2] + n * (st.my1 - p.mu1);
        h[0][3] = h[0][3] + n * (st.my2 - p.mu2);
        h[1][3] = h[1][3] + n * (st.my1 - p.mu1);
        h[1][4] = h[1][4] + n * (st.my2 - p.mu2);
    }
    if r > T::zero() {
        let dz1 = st.mz1 - p.mu1;
        h[0][0] = h[0][0] - r * det / g22;
        h[0][2] = h[0][2] + r * dz1;
        h[0][3] = h[0][3] - two * r * dz1 * g12 / g22;
        h[0][4] = h[0][4] + r * dz1 * g12 * g12 / (g22 * g22);
        h[4][4] = h[4][4] + half * r / (g22 * g22) + r * g12 * g12 / (g22 * g22 * g22) * q.qz;
        h[3][4] = h[3][4] - r * g12 / (g22 * g22) * q.qz;
        h[3][3] = h[3][3] + r * q.qz / g22;
    }
    if s > T::zero() {
        let dw1 = st.mw1 - p.mu2;
        h[1][1] = h[1][1] - s * det / g11;
        h[1][4] = h[1][4] + s * dw1;
        h[1][3] = h[1][3] - two * s * dw1 * g12 / g11;
        h[1][2] = h[1][2] + s * dw1 * g12 * g12 / (g11 * g11);
        h[2][2] = h[2][2] + half * s / (g11 * g11) + s * g12 * g12 / (g11 * g11 * g11) * q.qw;
        h[2][3] = h[2][3] - s * g12 / (g11 * g11) * q.qw;
        h[3][3] = h[3][3] + s * q.qw / g11;
    }

    // Fill the lower triangle.
    for i in 0..5 {
        for j in 0..i {
            h[i][j] = h[j][i];
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{reduce, Dataset};
    use approx::assert_relative_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn random_stats(rng: &mut impl Rng) -> SuffStats<f64> {
        let my1 = rng.random_range(-2.0..2.0);
        let my2 = rng.random_range(-2.0..2.0);
        let mz1 = rng.random_range(-2.0..2.0);
        let mw1 = rng.random_range(-2.0..2.0);
        SuffStats {
            n: rng.random_range(5..40) as f64,
            r: rng.random_range(1..20) as f64,
            s: rng.random_range(1..20) as f64,
            my1,
            my2,
            my11: my1 * my1 + rng.random_range(0.2..3.0),
            my12: my1 * my2 + rng.random_range(-0.5..0.5),
            my22: my2 * my2 + rng.random_range(0.2..3.0),
            mz1,
            mz2: mz1 * mz1 + rng.random_range(0.2..3.0),
            mw1,
            mw2: mw1 * mw1 + rng.random_range(0.2..3.0),
        }
    }

    fn random_chart_point(rng: &mut impl Rng) -> GaussianParams<f64> {
        // Γ = A Aᵗ + 0.1 I is PD.
        let a: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        GaussianParams::new(
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
            a[0] * a[0] + a[1] * a[1] + 0.1,
            a[0] * a[2] + a[1] * a[3],
            a[2] * a[2] + a[3] * a[3] + 0.1,
        )
    }

    #[test]
    fn loglik_vanishes_on_zero_data_identity_params() {
        let st = reduce(&Dataset::new(vec![[0.0, 0.0]], vec![], vec![]).unwrap());
        let p = GaussianParams::new(0.0, 0.0, 1.0, 0.0, 1.0);
        assert_eq!(loglik(&st, &p).unwrap(), 0.0);
    }

    #[test]
    fn loglik_vanishes_on_single_zero_z() {
        let st = reduce(&Dataset::new(vec![], vec![0.0], vec![]).unwrap());
        let p = GaussianParams::new(0.0, 0.0, 1.0, 0.0, 1.0);
        assert_eq!(loglik(&st, &p).unwrap(), 0.0);
    }

    #[test]
    fn loglik_rejects_chart_violation() {
        let st = reduce(&Dataset::new(vec![[0.0, 0.0]], vec![], vec![]).unwrap());
        let p = GaussianParams::new(0.0, 0.0, -1.0, 0.0, 1.0);
        assert!(loglik(&st, &p).is_err());
        let p = GaussianParams::new(0.0, 0.0, 1.0, 2.0, 1.0);
        assert!(loglik(&st, &p).is_err());
    }

    /// Independent oracle: sum of normal log densities of the raw
    /// observations, with the dropped constant added back.
    fn density_sum(ds: &Dataset<f64>, p: &GaussianParams<f64>) -> f64 {
        let (s11, s12, s22) = p.sigma().unwrap();
        let det_sigma = s11 * s22 - s12 * s12;
        let mut ll = 0.0;
        for pt in &ds.y {
            let d1 = pt[0] - p.mu1;
            let d2 = pt[1] - p.mu2;
            // quadratic form dᵗ Σ⁻¹ d via the adjugate
            let quad = (s22 * d1 * d1 - 2.0 * s12 * d1 * d2 + s11 * d2 * d2) / det_sigma;
            ll += -0.5 * det_sigma.ln() - 0.5 * quad - std::f64::consts::TAU.ln();
        }
        for z in &ds.z {
            let d = z - p.mu1;
            ll += -0.5 * s11.ln() - 0.5 * d * d / s11 - 0.5 * std::f64::consts::TAU.ln();
        }
        for w in &ds.w {
            let d = w - p.mu2;
            ll += -0.5 * s22.ln() - 0.5 * d * d / s22 - 0.5 * std::f64::consts::TAU.ln();
        }
        // Add back the dropped constant: (2n + r + s)/2 · log 2π.
        let c = (2 * ds.y.len() + ds.z.len() + ds.w.len()) as f64 / 2.0;
        ll + c * std::f64::consts::TAU.ln()
    }

    #[test]
    fn loglik_matches_density_sum_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let y: Vec<[f64; 2]> = (0..8)
                .map(|_| [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)])
                .collect();
            let z: Vec<f64> = (0..5).map(|_| rng.random_range(-2.0..2.0)).collect();
            let w: Vec<f64> = (0..3).map(|_| rng.random_range(-2.0..2.0)).collect();
            let ds = Dataset::new(y, z, w).unwrap();
            let st = reduce(&ds);
            let p = random_chart_point(&mut rng);
            let got = loglik(&st, &p).unwrap();
            let want = density_sum(&ds, &p);
            assert_relative_eq!(got, want, max_relative = 1e-10);
        }
    }

    fn fd_gradient(st: &SuffStats<f64>, p: &GaussianParams<f64>) -> [f64; 5] {
        let coords = [p.mu1, p.mu2, p.g11, p.g12, p.g22];
        std::array::from_fn(|k| {
            let scale = 1.0 + coords[k].abs();
            let h = 1e-6 * scale;
            let mut hi = *p;
            let mut lo = *p;
            match k {
                0 => {
                    hi.mu1 += h;
                    lo.mu1 -= h;
                }
                1 => {
                    hi.mu2 += h;
                    lo.mu2 -= h;
                }
                2 => {
                    hi.g11 += h;
                    lo.g11 -= h;
                }
                3 => {
                    hi.g12 += h;
                    lo.g12 -= h;
                }
                _ => {
                    hi.g22 += h;
                    lo.g22 -= h;
                }
            }
            (loglik(st, &hi).unwrap() - loglik(st, &lo).unwrap()) / (2.0 * h)
        })
    }

    #[test]
    fn score_matches_finite_differences_at_100_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let st = random_stats(&mut rng);
            let p = random_chart_point(&mut rng);
            let sc = score(&st, &p).unwrap().as_array();
            let fd = fd_gradient(&st, &p);
            for k in 0..5 {
                let tol = 1e-5 * (1.0 + fd[k].abs());
                assert!(
                    (sc[k] - fd[k]).abs() <= tol,
                    "component {k}: analytic {} vs fd {}",
                    sc[k],
                    fd[k]
                );
            }
        }
    }

    #[test]
    fn score_vanishes_at_complete_data_mle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let y: Vec<[f64; 2]> = (0..30)
            .map(|_| [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)])
            .collect();
        let st = reduce(&Dataset::new(y, vec![], vec![]).unwrap());
        let s11 = st.my11 - st.my1 * st.my1;
        let s12 = st.my12 - st.my1 * st.my2;
        let s22 = st.my22 - st.my2 * st.my2;
        let p = GaussianParams::from_sigma(st.my1, st.my2, s11, s12, s22).unwrap();
        assert!(score(&st, &p).unwrap().norm() < 1e-10 * st.n);
    }

    #[test]
    fn score_swaps_under_coordinate_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let st = random_stats(&mut rng);
            let p = random_chart_point(&mut rng);
            let swapped_st = SuffStats {
                n: st.n,
                r: st.s,
                s: st.r,
                my1: st.my2,
                my2: st.my1,
                my11: st.my22,
                my12: st.my12,
                my22: st.my11,
                mz1: st.mw1,
                mz2: st.mw2,
                mw1: st.mz1,
                mw2: st.mz2,
            };
            let swapped_p = GaussianParams::new(p.mu2, p.mu1, p.g22, p.g12, p.g11);
            let a = score(&st, &p).unwrap();
            let b = score(&swapped_st, &swapped_p).unwrap();
            assert_relative_eq!(a.d_mu1, b.d_mu2, max_relative = 1e-12);
            assert_relative_eq!(a.d_mu2, b.d_mu1, max_relative = 1e-12);
            assert_relative_eq!(a.d_g11, b.d_g22, max_relative = 1e-12);
            assert_relative_eq!(a.d_g12, b.d_g12, max_relative = 1e-12);
            assert_relative_eq!(a.d_g22, b.d_g11, max_relative = 1e-12);
        }
    }

    fn fd_hessian(st: &SuffStats<f64>, p: &GaussianParams<f64>) -> [[f64; 5]; 5] {
        let coords = [p.mu1, p.mu2, p.g11, p.g12, p.g22];
        let mut out = [[0.0; 5]; 5];
        for k in 0..5 {
            let h = 1e-6 * (1.0 + coords[k].abs());
            let mut hi = *p;
            let mut lo = *p;
            match k {
                0 => {
                    hi.mu1 += h;
                    lo.mu1 -= h;
                }
                1 => {
                    hi.mu2 += h;
                    lo.mu2 -= h;
                }
                2 => {
                    hi.g11 += h;
                    lo.g11 -= h;
                }
                3 => {
                    hi.g12 += h;
                    lo.g12 -= h;
                }
                _ => {
                    hi.g22 += h;
                    lo.g22 -= h;
                }
            }
            let sh = score(st, &hi).unwrap().as_array();
            let sl = score(st, &lo).unwrap().as_array();
            for i in 0..5 {
                out[i][k] = (sh[i] - sl[i]) / (2.0 * h);
            }
        }
        out
    }

    #[test]
    fn hessian_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..100 {
            let st = random_stats(&mut rng);
            let p = random_chart_point(&mut rng);
            let h = hessian(&st, &p).unwrap();
            let fd = fd_hessian(&st, &p);
            for i in 0..5 {
                for j in 0..5 {
                    let tol = 1e-4 * (1.0 + fd[i][j].abs());
                    assert!(
                        (h[i][j] - fd[i][j]).abs() <= tol,
                        "entry ({i},{j}): analytic {} vs fd {}",
                        h[i][j],
                        fd[i][j]
                    );
                }
            }
        }
    }

    #[test]
    fn hessian_is_exactly_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let st = random_stats(&mut rng);
            let p = random_chart_point(&mut rng);
            let h = hessian(&st, &p).unwrap();
            for i in 0..5 {
                for j in 0..5 {
                    assert_eq!(h[i][j], h[j][i]);
                }
            }
        }
    }

    #[test]
    fn hessian_negative_definite_at_complete_data_mle() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let y: Vec<[f64; 2]> = (0..40)
            .map(|_| [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)])
            .collect();
        let st = reduce(&Dataset::new(y, vec![], vec![]).unwrap());
        let s11 = st.my11 - st.my1 * st.my1;
        let s12 = st.my12 - st.my1 * st.my2;
        let s22 = st.my22 - st.my2 * st.my2;
        let p = GaussianParams::from_sigma(st.my1, st.my2, s11, s12, s22).unwrap();
        let h = hessian(&st, &p).unwrap();
        let eig = crate::linalg::symmetric_eigenvalues(&h);
        assert!(eig.iter().all(|l| *l < 0.0), "eigenvalues {eig:?}");
    }

    #[test]
    fn loglik_decreases_along_rays_to_boundary_and_infinity() {
        // Compactness behavior: beyond some ray parameter the value strictly
        // decreases, both toward infinity and toward the PD boundary.
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let y: Vec<[f64; 2]> = (0..25)
            .map(|_| [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)])
            .collect();
        let z: Vec<f64> = (0..10).map(|_| rng.random_range(-2.0..2.0)).collect();
        let w: Vec<f64> = (0..10).map(|_| rng.random_range(-2.0..2.0)).collect();
        let st = reduce(&Dataset::new(y, z, w).unwrap());
        let base = GaussianParams::new(0.1, -0.2, 1.0, 0.1, 1.2);

        for ray in 0..10 {
            let dir: [f64; 5] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
            // Outward ray: decreasing for large k (parameter norm to infinity,
            // Γ kept PD by inflating the diagonal).
            let mut prev = f64::INFINITY;
            let mut decreasing_tail = true;
            for k in 1..=8 {
                let tmul = (2.0f64).powi(k);
                let p = GaussianParams::new(
                    base.mu1 + dir[0] * tmul,
                    base.mu2 + dir[1] * tmul,
                    base.g11 * (1.0 + dir[2].abs() * tmul),
                    base.g12,
                    base.g22 * (1.0 + dir[4].abs() * tmul),
                );
                let v = loglik(&st, &p).unwrap();
                if k > 3 && v >= prev {
                    decreasing_tail = false;
                }
                prev = v;
            }
            assert!(decreasing_tail, "ray {ray} not eventually decreasing outward");

            // Boundary ray: det Γ → 0 with g12² → g11·g22.
            let mut prev = f64::INFINITY;
            let mut decreasing_tail = true;
            for k in 1..=8 {
                let eps = (4.0f64).powi(-k);
                let g12 = (base.g11 * base.g22 * (1.0 - eps)).sqrt();
                let p = GaussianParams::new(base.mu1, base.mu2, base.g11, g12, base.g22);
                let v = loglik(&st, &p).unwrap();
                if k > 3 && v >= prev {
                    decreasing_tail = false;
                }
                prev = v;
            }
            assert!(decreasing_tail, "ray {ray} not decreasing toward PD boundary");
        }
    }
}
